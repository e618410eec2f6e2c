#pragma once

#include "metriko/core.hpp"
#include "metriko/linalg.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace metriko {

struct OptimConfig {
  double learning_rate = 0.001;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  bool adaptive = true;
};

inline void validate(const OptimConfig& cfg) {
  require(cfg.learning_rate > 0.0, ErrorKind::BadArgument, "learning_rate must be positive");
  require(cfg.tol >= 0.0, ErrorKind::BadArgument, "tol must be nonnegative");
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename State>
struct OptimResult {
  State state;
  FitReport report;
};

inline bool is_finite(double v) { return std::isfinite(v); }
template <typename Derived>
bool is_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

// Minimizes `objective`. Each step is x <- project(x - eta * gradient(x)).
// Adaptive mode: accepted improvement grows eta by 1%, a worse step is
// reverted and eta halved. The best state seen is returned and the trace
// records the best objective after every iteration.
template <typename State, typename Objective, typename Gradient, typename Project>
OptimResult<State> descend(Objective&& objective, Gradient&& gradient, const State& init, const OptimConfig& cfg,
                           Project&& project) {
  validate(cfg);
  Stopwatch clock;
  State x = init;
  double f = objective(x);
  require(is_finite(f), ErrorKind::DivergedToNaN, "objective is not finite at the initial point");

  State best = x;
  double fbest = f;
  double eta = cfg.learning_rate;
  FitReport rep;
  rep.objective_trace.push_back(f);

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    rep.iterations = it;
    const State g = gradient(x);
    require(is_finite(g), ErrorKind::DivergedToNaN, "gradient is not finite");
    State xn = project(State(x - eta * g));
    const double fn = objective(xn);

    if (cfg.adaptive) {
      if (!is_finite(fn) || fn > f) {
        eta *= 0.5;
        rep.objective_trace.push_back(fbest);
        if (eta < 1e-12) {
          rep.converged = true;
          break;
        }
        continue;
      }
      const double change = std::abs(f - fn);
      x = std::move(xn);
      f = fn;
      eta *= 1.01;
      if (f < fbest) {
        fbest = f;
        best = x;
      }
      rep.objective_trace.push_back(fbest);
      if (change <= cfg.tol * std::max(std::abs(f), 1.0)) {
        rep.converged = true;
        break;
      }
    } else {
      require(is_finite(fn), ErrorKind::DivergedToNaN, "objective became non-finite");
      const double change = std::abs(f - fn);
      x = std::move(xn);
      f = fn;
      if (f < fbest) {
        fbest = f;
        best = x;
      }
      rep.objective_trace.push_back(fbest);
      if (change <= cfg.tol * std::max(std::abs(f), 1.0)) {
        rep.converged = true;
        break;
      }
    }
  }
  rep.final_objective = fbest;
  rep.elapsed = clock.seconds();
  return {best, rep};
}

template <typename State, typename Objective, typename Gradient>
OptimResult<State> gradient_descend(Objective&& objective, Gradient&& gradient, const State& init,
                                    const OptimConfig& cfg) {
  return descend(std::forward<Objective>(objective), std::forward<Gradient>(gradient), init, cfg,
                 [](State s) { return s; });
}

// Ascent via descent on -f; the report carries the maximized values.
template <typename State, typename Objective, typename Gradient, typename Project>
OptimResult<State> ascend(Objective&& objective, Gradient&& gradient, const State& init, const OptimConfig& cfg,
                          Project&& project) {
  auto res = descend([&](const State& s) { return -objective(s); }, [&](const State& s) { return State(-gradient(s)); },
                     init, cfg, std::forward<Project>(project));
  for (double& v : res.report.objective_trace) v = -v;
  res.report.final_objective = -res.report.final_objective;
  return res;
}

template <typename Objective, typename Gradient>
OptimResult<Matrix> projected_gradient_psd(Objective&& objective, Gradient&& subgradient, const Matrix& init,
                                           const OptimConfig& cfg) {
  require_square(init, "projected_gradient_psd");
  require(min_eigenvalue(init) >= -1e-8 * std::max(1.0, init.norm()), ErrorKind::NotPSD,
          "projected_gradient_psd: initial matrix is not PSD");
  return descend(std::forward<Objective>(objective), std::forward<Gradient>(subgradient), psd_project(init), cfg,
                 [](const Matrix& m) { return psd_project(m); });
}

template <typename State>
struct ProjectionResult {
  State state;
  bool converged = false;
  std::size_t cycles = 0;
  double residual = 0.0;
};

template <typename State>
double state_norm(const State& s) {
  if constexpr (std::is_arithmetic_v<State>) {
    return std::abs(s);
  } else {
    return s.norm();
  }
}

// Cyclic projections onto each set in turn. Residual = max ||P(x) - x||.
template <typename State>
ProjectionResult<State> iterated_projections(const std::vector<std::function<State(const State&)>>& projections,
                                             const State& init, std::size_t max_cycles, double tol) {
  ProjectionResult<State> out{init};
  if (projections.empty()) {
    out.converged = true;
    return out;
  }
  State x = init;
  for (std::size_t c = 1; c <= max_cycles; ++c) {
    for (const auto& p : projections) x = p(x);
    double res = 0.0;
    for (const auto& p : projections) res = std::max(res, state_norm(State(p(x) - x)));
    out.cycles = c;
    out.residual = res;
    if (res <= tol) {
      out.converged = true;
      break;
    }
  }
  out.state = x;
  return out;
}

}  // namespace metriko
