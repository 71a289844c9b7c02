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

#ifndef OPTDESIGN_GP_HPP
#define OPTDESIGN_GP_HPP

// Gaussian process regression over two-dimensional design points with an
// anisotropic squared-exponential kernel and a constant prior mean.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "optdesign/errors.hpp"

namespace optdesign {

using Point2 = std::array<double, 2>;

struct KernelParams {
  double signal_variance = 1.0;
  std::array<double, 2> length_scales{1.0, 1.0};
  double noise_variance = 0.0;
};

inline double se_kernel(const KernelParams& k, const Point2& a, const Point2& b) {
  const double d0 = (a[0] - b[0]) / k.length_scales[0];
  const double d1 = (a[1] - b[1]) / k.length_scales[1];
  return k.signal_variance * std::exp(-0.5 * (d0 * d0 + d1 * d1));
}

// Jitter added to the diagonal when the covariance is not numerically
// positive definite, tried in order before giving up.
inline constexpr std::array<double, 6> kJitterLadder = {0.0,  1e-10, 1e-9,
                                                        1e-8, 1e-7,  1e-6};

class GaussianProcess {
 public:
  GaussianProcess() = default;

  // Conditions on (xs, ys). prior_mean is the constant mean function.
  void fit(std::vector<Point2> xs, std::vector<double> ys,
           const KernelParams& kernel, double prior_mean) {
    if (xs.empty() || xs.size() != ys.size()) {
      throw InvalidArgument("GP needs at least one observation");
    }
    xs_ = std::move(xs);
    kernel_ = kernel;
    prior_mean_ = prior_mean;
    const auto n = static_cast<Eigen::Index>(xs_.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        cov(i, j) = cov(j, i) = se_kernel(kernel_, xs_[i], xs_[j]);
      }
      cov(i, i) += kernel_.noise_variance;
    }
    Eigen::VectorXd resid(n);
    for (Eigen::Index i = 0; i < n; ++i) resid(i) = ys[i] - prior_mean_;
    for (double jitter : kJitterLadder) {
      Eigen::MatrixXd c = cov;
      c.diagonal().array() += jitter;
      chol_.compute(c);
      if (chol_.info() == Eigen::Success && chol_.matrixL().toDenseMatrix()
                                                .diagonal()
                                                .minCoeff() > 0.0) {
        jitter_ = jitter;
        weights_ = chol_.solve(resid);
        return;
      }
    }
    throw NumericalError("GP covariance is not positive definite after jitter 1e-6");
  }

  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };

  Prediction predict(const Point2& x) const {
    const auto n = static_cast<Eigen::Index>(xs_.size());
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k(i) = se_kernel(kernel_, x, xs_[i]);
    const Eigen::VectorXd v = chol_.matrixL().solve(k);
    const double var = kernel_.signal_variance - v.squaredNorm();
    return {prior_mean_ + k.dot(weights_), std::max(var, 0.0)};
  }

  std::size_t size() const { return xs_.size(); }
  const KernelParams& kernel() const { return kernel_; }
  double prior_mean() const { return prior_mean_; }
  double jitter() const { return jitter_; }

 private:
  std::vector<Point2> xs_;
  KernelParams kernel_;
  double prior_mean_ = 0.0;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd weights_;
};

// Profiled log marginal likelihood for correlation length scales and a
// noise-to-signal ratio; the signal variance takes its closed-form maximizer.
// Returns -inf when the correlation matrix cannot be factored.
inline double profiled_log_likelihood(const std::vector<Point2>& xs,
                                      const std::vector<double>& ys,
                                      double prior_mean,
                                      const std::array<double, 2>& length_scales,
                                      double noise_ratio, double* signal_variance) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  KernelParams unit{1.0, length_scales, 0.0};
  Eigen::MatrixXd corr(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      corr(i, j) = corr(j, i) = se_kernel(unit, xs[i], xs[j]);
    }
    corr(i, i) += noise_ratio + 1e-10;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = ys[i] - prior_mean;
  const double quad = r.dot(llt.solve(r));
  const double s2 = std::max(quad / static_cast<double>(n), 1e-12);
  double log_det = 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
  if (signal_variance) *signal_variance = s2;
  return -0.5 * static_cast<double>(n) * std::log(s2) - 0.5 * log_det;
}

// Maximizes the profiled marginal likelihood over a fixed log-spaced grid of
// length scales (fractions of each dimension's range) and noise ratios.
inline KernelParams fit_kernel(const std::vector<Point2>& xs,
                               const std::vector<double>& ys, double prior_mean,
                               const std::array<double, 2>& ranges) {
  static constexpr std::array<double, 7> kScaleFractions = {
      1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0, 2.0, 4.0};
  static constexpr std::array<double, 6> kNoiseRatios = {1e-8, 1e-5, 1e-3,
                                                         1e-2, 1e-1, 0.5};
  KernelParams best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double f0 : kScaleFractions) {
    for (double f1 : kScaleFractions) {
      for (double ratio : kNoiseRatios) {
        double s2 = 0.0;
        const std::array<double, 2> ls{f0 * ranges[0], f1 * ranges[1]};
        const double ll = profiled_log_likelihood(xs, ys, prior_mean, ls, ratio, &s2);
        if (ll > best_ll) {
          best_ll = ll;
          best = {s2, ls, ratio * s2};
        }
      }
    }
  }
  if (!std::isfinite(best_ll)) {
    throw NumericalError("no kernel hyperparameters gave a finite likelihood");
  }
  return best;
}

}  // namespace optdesign

#endif  // OPTDESIGN_GP_HPP
