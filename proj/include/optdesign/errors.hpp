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

#ifndef OPTDESIGN_ERRORS_HPP
#define OPTDESIGN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace optdesign {

// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A perfect-stranger schedule cannot exist for the requested size.
class InfeasibleSchedule : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Exact enumeration would exceed the configured dataset cap.
class EnumerationCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-form strategy produced a value outside [0, 1].
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical failure that jitter could not repair.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The search objective threw at a design point.
class ObjectiveError : public std::runtime_error {
 public:
  ObjectiveError(double max_payoff, double prob_a, const std::string& what)
      : std::runtime_error("objective failed at A=" + std::to_string(max_payoff) +
                           ", pi=" + std::to_string(prob_a) + ": " + what),
        max_payoff_(max_payoff),
        prob_a_(prob_a) {}

  double max_payoff() const { return max_payoff_; }
  double prob_a() const { return prob_a_; }

 private:
  double max_payoff_;
  double prob_a_;
};

// Malformed input file; row is 1-based and counts the header line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ", column '" +
                           column + "': " + what),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace optdesign

#endif  // OPTDESIGN_ERRORS_HPP
