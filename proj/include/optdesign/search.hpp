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

#ifndef OPTDESIGN_SEARCH_HPP
#define OPTDESIGN_SEARCH_HPP

// Design-space search: GP-UCB with pure-exploration steps, Sobol
// initialization and a rank-correlation stopping rule, plus grid-scan and
// random-search baselines. All searches run over a finite design lattice.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "optdesign/errors.hpp"
#include "optdesign/gp.hpp"
#include "optdesign/random.hpp"
#include "optdesign/sobol.hpp"
#include "optdesign/stopgo.hpp"

namespace optdesign {

// Evenly spaced lattice over [a_lo, a_hi] x [pi_lo, pi_hi]. Index is
// ia * n_pi + ip, so A is the outer (row) coordinate.
struct DesignGrid {
  int n_a = 20;
  int n_pi = 20;
  double a_lo = kMinPayoff;
  double a_hi = kMaxPayoff;
  double pi_lo = kMinPi;
  double pi_hi = kMaxPi;

  std::size_t size() const { return static_cast<std::size_t>(n_a) * n_pi; }
  std::size_t index(int ia, int ip) const {
    return static_cast<std::size_t>(ia) * n_pi + ip;
  }
  int a_index(std::size_t i) const { return static_cast<int>(i / n_pi); }
  int pi_index(std::size_t i) const { return static_cast<int>(i % n_pi); }

  double a_value(int ia) const {
    if (n_a == 1) return a_lo;
    return ia == n_a - 1 ? a_hi : a_lo + (a_hi - a_lo) * ia / (n_a - 1);
  }
  double pi_value(int ip) const {
    if (n_pi == 1) return pi_lo;
    return ip == n_pi - 1 ? pi_hi : pi_lo + (pi_hi - pi_lo) * ip / (n_pi - 1);
  }
  GameDesign design(std::size_t i) const {
    return {a_value(a_index(i)), pi_value(pi_index(i))};
  }
  Point2 point(std::size_t i) const {
    return {a_value(a_index(i)), pi_value(pi_index(i))};
  }
  std::array<double, 2> ranges() const {
    return {std::max(a_hi - a_lo, 1e-12), std::max(pi_hi - pi_lo, 1e-12)};
  }

  // Nearest lattice point to a point of the unit square.
  std::size_t snap(double u_a, double u_pi) const {
    const auto ia = static_cast<int>(std::lround(u_a * (n_a - 1)));
    const auto ip = static_cast<int>(std::lround(u_pi * (n_pi - 1)));
    return index(std::clamp(ia, 0, n_a - 1), std::clamp(ip, 0, n_pi - 1));
  }

  void validate() const {
    if (n_a < 1 || n_pi < 1) throw InvalidArgument("design grid needs >= 1 point per axis");
    if (!(a_lo <= a_hi) || !(pi_lo <= pi_hi)) {
      throw InvalidArgument("design grid bounds are inverted");
    }
    optdesign::validate(GameDesign{a_lo, pi_lo});
    optdesign::validate(GameDesign{a_hi, pi_hi});
  }
};

// First n Sobol points (index 1 onwards) snapped to the grid; a snapped point
// that repeats an earlier one is dropped, so fewer than n may come back.
inline std::vector<std::size_t> sobol_indices(std::size_t n, const DesignGrid& grid) {
  if (n < 1) throw InvalidArgument("sobol_points needs n >= 1");
  if (n > grid.size()) throw InvalidArgument("more Sobol points requested than grid points");
  Sobol2D sobol;
  std::vector<std::size_t> out;
  std::vector<bool> seen(grid.size(), false);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [u, v] = sobol.next();
    const std::size_t i = grid.snap(u, v);
    if (!seen[i]) {
      seen[i] = true;
      out.push_back(i);
    }
  }
  return out;
}

inline std::vector<GameDesign> sobol_points(std::size_t n, const DesignGrid& grid) {
  std::vector<GameDesign> out;
  for (std::size_t i : sobol_indices(n, grid)) out.push_back(grid.design(i));
  return out;
}

// ---------------------------------------------------------------------------
// Stopping rule.

// Fractional ranks (1-based) with ties given their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

// Spearman correlation as the Pearson correlation of average ranks. When
// either side has no rank variation the correlation is taken to be 1.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("spearman: size mismatch");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 1.0;
  return sab / std::sqrt(saa * sbb);
}

class StoppingRule {
 public:
  StoppingRule(double threshold, int repeats) : threshold_(threshold), repeats_(repeats) {}

  // Records one comparison; true once `repeats` consecutive comparisons have
  // reached the threshold.
  bool check(const std::vector<double>& prev, const std::vector<double>& curr) {
    last_ = spearman(prev, curr);
    passes_ = last_ >= threshold_ ? passes_ + 1 : 0;
    return passes_ >= repeats_;
  }

  int passes() const { return passes_; }
  double last_correlation() const { return last_; }

 private:
  double threshold_;
  int repeats_;
  int passes_ = 0;
  double last_ = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// Acquisition.

struct SearchConfig {
  std::size_t n_init = 8;
  // Fixed UCB width; when unset, beta_t = 2 log(|grid| t^2 pi^2 / (6 delta)).
  std::optional<double> beta;
  double delta = 0.1;
  double stop_threshold = 0.999;
  int stop_repeats = 3;
  bool use_stopping = true;
  // Benchmarks only: end the run once regret reaches zero (needs true_max).
  bool stop_at_zero_regret = false;
  std::size_t budget = 400;
  std::size_t refit_every = 5;

  void validate(const DesignGrid& grid) const {
    if (n_init < 2) throw InvalidArgument("n_init must be >= 2");
    if (!(stop_threshold >= 0.0 && stop_threshold < 1.0)) {
      throw InvalidArgument("stop_threshold must lie in [0, 1)");
    }
    if (stop_repeats < 1) throw InvalidArgument("stop_repeats must be >= 1");
    if (budget < n_init) throw InvalidArgument("budget must be >= n_init");
    if (n_init > grid.size()) throw InvalidArgument("n_init exceeds the grid size");
    if (beta && !(*beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (refit_every < 1) throw InvalidArgument("refit_every must be >= 1");
  }
};

inline double beta_schedule(std::size_t grid_size, std::size_t t, double delta) {
  const double td = static_cast<double>(std::max<std::size_t>(t, 1));
  return 2.0 * std::log(static_cast<double>(grid_size) * td * td *
                        std::numbers::pi * std::numbers::pi / (6.0 * delta));
}

struct Posterior {
  std::vector<double> mean;
  std::vector<double> variance;
};

enum class QueryKind { kInit, kUcb, kPe, kGridScan, kRandom };

inline const char* to_string(QueryKind k) {
  switch (k) {
    case QueryKind::kInit: return "init";
    case QueryKind::kUcb: return "ucb";
    case QueryKind::kPe: return "pe";
    case QueryKind::kGridScan: return "grid_scan";
    case QueryKind::kRandom: return "random";
  }
  return "?";
}

struct Query {
  std::size_t index = 0;
  QueryKind kind = QueryKind::kUcb;
};

// Even steps maximize mean + sqrt(beta) sd over unobserved points. Odd steps
// maximize sd over the unobserved points whose UCB reaches the best LCB on the
// grid; if that set is empty the UCB point is used. Ties go to the lowest index.
inline Query next_query(const Posterior& post, const std::vector<bool>& observed,
                        std::size_t step_index, double beta) {
  const std::size_t n = post.mean.size();
  const double width = std::sqrt(beta);
  auto sd = [&](std::size_t i) { return std::sqrt(std::max(post.variance[i], 0.0)); };
  auto ucb = [&](std::size_t i) { return post.mean[i] + width * sd(i); };

  std::optional<std::size_t> best_ucb;
  double best_lcb = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    best_lcb = std::max(best_lcb, post.mean[i] - width * sd(i));
    if (observed[i]) continue;
    if (!best_ucb || ucb(i) > ucb(*best_ucb)) best_ucb = i;
  }
  if (!best_ucb) throw InvalidArgument("every grid point has been observed");
  if (step_index % 2 == 0) return {*best_ucb, QueryKind::kUcb};

  std::optional<std::size_t> best_sd;
  for (std::size_t i = 0; i < n; ++i) {
    if (observed[i] || ucb(i) < best_lcb) continue;
    if (!best_sd || sd(i) > sd(*best_sd)) best_sd = i;
  }
  return {best_sd.value_or(*best_ucb), QueryKind::kPe};
}

// ---------------------------------------------------------------------------
// Regret bookkeeping.

struct RegretCurve {
  std::vector<double> values;  // after each evaluation

  // Number of evaluations until regret first reaches zero, or nullopt.
  std::optional<std::size_t> evaluations_to_zero() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] <= 0.0) return i + 1;
    }
    return std::nullopt;
  }
};

struct TraceRow {
  std::size_t step = 0;
  QueryKind kind = QueryKind::kInit;
  GameDesign design;
  double objective_value = 0.0;
  std::optional<double> posterior_max;
  std::optional<double> regret;
  bool stopped = false;
};

inline const char* kTraceHeader = "step,kind,A,pi,objective_value,posterior_max,regret,stopped";

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_trace(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << kTraceHeader << '\n';
  for (const auto& r : rows) {
    os << r.step << ',' << to_string(r.kind) << ',' << format_number(r.design.max_payoff)
       << ',' << format_number(r.design.prob_a) << ',' << format_number(r.objective_value)
       << ',' << (r.posterior_max ? format_number(*r.posterior_max) : "") << ','
       << (r.regret ? format_number(*r.regret) : "") << ',' << (r.stopped ? 1 : 0) << '\n';
  }
}

using DesignObjective = std::function<double(const GameDesign&)>;

namespace detail {

inline double evaluate_at(const DesignObjective& objective, const GameDesign& d) {
  try {
    return objective(d);
  } catch (const std::exception& e) {
    throw ObjectiveError(d.max_payoff, d.prob_a, e.what());
  }
}

class RegretTracker {
 public:
  explicit RegretTracker(std::optional<double> true_max) : true_max_(true_max) {}

  std::optional<double> record(double value) {
    best_ = std::max(best_, value);
    if (!true_max_) return std::nullopt;
    const double r = std::max(*true_max_ - best_, 0.0);
    curve_.values.push_back(r);
    return r;
  }

  const RegretCurve& curve() const { return curve_; }

 private:
  std::optional<double> true_max_;
  double best_ = -std::numeric_limits<double>::infinity();
  RegretCurve curve_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// GP-UCB-PE.

struct SearchResult {
  std::vector<double> surface;  // posterior mean over the grid
  std::vector<double> surface_variance;
  std::size_t argmax = 0;       // grid index maximizing the surface
  GameDesign argmax_design;
  double argmax_value = 0.0;    // posterior mean at argmax
  std::size_t best_observed = 0;
  double best_observed_value = 0.0;
  std::vector<std::size_t> queried;  // grid indices in query order
  std::vector<double> values;        // objective values in query order
  std::vector<TraceRow> trace;
  RegretCurve regret;
  std::size_t evaluations = 0;
  std::string stopped_by;  // "rule", "budget", "exhausted" or "regret"
};

class GpSearchState {
 public:
  GpSearchState(const DesignGrid& grid, const SearchConfig& config)
      : grid_(grid), config_(config), observed_(grid.size(), false) {}

  void add(std::size_t index, double value) {
    observed_[index] = true;
    xs_.push_back(grid_.point(index));
    ys_.push_back(value);
  }

  // Refits the GP. The first fit uses the default hyperparameters; later fits
  // re-estimate them whenever the observation count is a multiple of
  // refit_every.
  void fit() {
    const double n = static_cast<double>(ys_.size());
    const double mean = std::accumulate(ys_.begin(), ys_.end(), 0.0) / n;
    const auto ranges = grid_.ranges();
    if (!kernel_) {
      double var = 0.0;
      for (double y : ys_) var += (y - mean) * (y - mean);
      var = std::max(var / n, 1e-12);
      kernel_ = KernelParams{var, {0.25 * ranges[0], 0.25 * ranges[1]}, 1e-6 * var};
    } else if (ys_.size() % config_.refit_every == 0) {
      kernel_ = fit_kernel(xs_, ys_, mean, ranges);
    }
    gp_.fit(xs_, ys_, *kernel_, mean);
  }

  Posterior posterior() const {
    Posterior p;
    p.mean.resize(grid_.size());
    p.variance.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const auto pred = gp_.predict(grid_.point(i));
      p.mean[i] = pred.mean;
      p.variance[i] = pred.variance;
    }
    return p;
  }

  const std::vector<bool>& observed() const { return observed_; }
  std::size_t size() const { return ys_.size(); }
  const GaussianProcess& gp() const { return gp_; }

 private:
  DesignGrid grid_;
  SearchConfig config_;
  std::vector<bool> observed_;
  std::vector<Point2> xs_;
  std::vector<double> ys_;
  std::optional<KernelParams> kernel_;
  GaussianProcess gp_;
};

// The search itself is deterministic; randomness, if any, lives inside the
// objective. true_max enables the regret column.
inline SearchResult run_gpucbpe(const DesignObjective& objective, const DesignGrid& grid,
                                const SearchConfig& config,
                                std::optional<double> true_max = std::nullopt) {
  grid.validate();
  config.validate(grid);
  SearchResult res;
  GpSearchState state(grid, config);
  detail::RegretTracker regret(true_max);
  const std::size_t budget = std::min(config.budget, grid.size());

  auto observe = [&](std::size_t index, QueryKind kind) {
    const GameDesign d = grid.design(index);
    const double v = detail::evaluate_at(objective, d);
    state.add(index, v);
    res.queried.push_back(index);
    res.values.push_back(v);
    TraceRow row;
    row.step = res.queried.size();
    row.kind = kind;
    row.design = d;
    row.objective_value = v;
    row.regret = regret.record(v);
    res.trace.push_back(row);
  };

  for (std::size_t i : sobol_indices(config.n_init, grid)) observe(i, QueryKind::kInit);
  state.fit();
  Posterior post = state.posterior();
  const double init_max = *std::max_element(post.mean.begin(), post.mean.end());
  for (auto& row : res.trace) row.posterior_max = init_max;

  StoppingRule rule(config.stop_threshold, config.stop_repeats);
  res.stopped_by = "budget";
  for (std::size_t step = 0;; ++step) {
    if (config.stop_at_zero_regret && res.trace.back().regret == 0.0) {
      res.stopped_by = "regret";
      break;
    }
    if (state.size() >= budget) {
      res.stopped_by = state.size() >= grid.size() ? "exhausted" : "budget";
      break;
    }
    const double beta =
        config.beta ? *config.beta : beta_schedule(grid.size(), step + 1, config.delta);
    const Query q = next_query(post, state.observed(), step, beta);
    observe(q.index, q.kind);
    state.fit();
    Posterior next = state.posterior();
    res.trace.back().posterior_max = *std::max_element(next.mean.begin(), next.mean.end());
    const bool stop = config.use_stopping && rule.check(post.mean, next.mean);
    post = std::move(next);
    if (stop) {
      res.trace.back().stopped = true;
      res.stopped_by = "rule";
      break;
    }
  }
  res.trace.back().stopped = true;

  res.surface = post.mean;
  res.surface_variance = post.variance;
  res.argmax = static_cast<std::size_t>(
      std::max_element(res.surface.begin(), res.surface.end()) - res.surface.begin());
  res.argmax_design = grid.design(res.argmax);
  res.argmax_value = res.surface[res.argmax];
  const auto best = std::max_element(res.values.begin(), res.values.end());
  res.best_observed = res.queried[static_cast<std::size_t>(best - res.values.begin())];
  res.best_observed_value = *best;
  res.regret = regret.curve();
  res.evaluations = res.queried.size();
  return res;
}

// ---------------------------------------------------------------------------
// Baselines.

enum class BaselineStrategy { kGridScan, kRandom };

inline std::vector<std::size_t> grid_scan_order(const DesignGrid& grid) {
  // Coarse-to-fine: lattice points whose indices are multiples of the stride,
  // for strides 2^k down to 1, each level adding only its new points in
  // row-major order.
  int stride = 1;
  while (stride * 2 <= std::max(grid.n_a, grid.n_pi) - 1) stride *= 2;
  std::vector<std::size_t> order;
  std::vector<bool> seen(grid.size(), false);
  for (; stride >= 1; stride /= 2) {
    for (int ia = 0; ia < grid.n_a; ia += stride) {
      for (int ip = 0; ip < grid.n_pi; ip += stride) {
        const std::size_t i = grid.index(ia, ip);
        if (!seen[i]) {
          seen[i] = true;
          order.push_back(i);
        }
      }
    }
  }
  return order;
}

inline std::vector<std::size_t> random_order(const DesignGrid& grid, std::uint64_t seed) {
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, "baseline/random");
  shuffle_range(order.begin(), order.end(), rng);
  return order;
}

struct BaselineResult {
  std::size_t best = 0;
  GameDesign best_design;
  double best_value = 0.0;
  std::vector<std::size_t> queried;
  std::vector<double> values;
  std::vector<TraceRow> trace;
  RegretCurve regret;
};

inline BaselineResult baseline_search(const DesignObjective& objective, const DesignGrid& grid,
                                      BaselineStrategy strategy, std::size_t budget,
                                      std::uint64_t seed,
                                      std::optional<double> true_max = std::nullopt) {
  grid.validate();
  if (budget < 1) throw InvalidArgument("budget must be >= 1");
  const std::vector<std::size_t> order =
      strategy == BaselineStrategy::kGridScan ? grid_scan_order(grid) : random_order(grid, seed);
  BaselineResult res;
  detail::RegretTracker regret(true_max);
  const std::size_t n = std::min(budget, order.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const GameDesign d = grid.design(order[k]);
    const double v = detail::evaluate_at(objective, d);
    if (v > best) {
      best = v;
      res.best = order[k];
    }
    res.queried.push_back(order[k]);
    res.values.push_back(v);
    TraceRow row;
    row.step = k + 1;
    row.kind = strategy == BaselineStrategy::kGridScan ? QueryKind::kGridScan
                                                       : QueryKind::kRandom;
    row.design = d;
    row.objective_value = v;
    row.posterior_max = best;
    row.regret = regret.record(v);
    row.stopped = k + 1 == n;
    res.trace.push_back(row);
  }
  res.best_design = grid.design(res.best);
  res.best_value = best;
  res.regret = regret.curve();
  return res;
}

}  // namespace optdesign

#endif  // OPTDESIGN_SEARCH_HPP
