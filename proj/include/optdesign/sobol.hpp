// Copyright 2026 The optdesign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPTDESIGN_SOBOL_HPP
#define OPTDESIGN_SOBOL_HPP

#include <array>
#include <cstdint>
#include <utility>

namespace optdesign {

// Two-dimensional Sobol sequence in Gray-code order (Antonov-Saleev).
// Dimension 1 is the base-2 van der Corput sequence; dimension 2 uses the
// primitive polynomial x + 1 with m_1 = 1.
class Sobol2D {
 public:
  static constexpr int kBits = 32;

  Sobol2D() {
    for (int k = 0; k < kBits; ++k) v1_[k] = 1u << (kBits - 1 - k);
    v2_[0] = 1u << (kBits - 1);
    for (int k = 1; k < kBits; ++k) v2_[k] = v2_[k - 1] ^ (v2_[k - 1] >> 1);
  }

  // Advances to the next point. The first call yields index 1, (0.5, 0.5).
  std::pair<double, double> next() {
    // Flip the direction number of the lowest zero bit of the old index.
    int c = 0;
    for (std::uint32_t i = index_; i & 1u; i >>= 1) ++c;
    x1_ ^= v1_[c];
    x2_ ^= v2_[c];
    ++index_;
    return {x1_ * 0x1.0p-32, x2_ * 0x1.0p-32};
  }

  std::uint32_t index() const { return index_; }

 private:
  std::array<std::uint32_t, kBits> v1_{};
  std::array<std::uint32_t, kBits> v2_{};
  std::uint32_t x1_ = 0;
  std::uint32_t x2_ = 0;
  std::uint32_t index_ = 0;
};

}  // namespace optdesign

#endif  // OPTDESIGN_SOBOL_HPP
