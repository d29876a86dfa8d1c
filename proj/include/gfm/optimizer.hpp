#pragma once

// Riemannian conjugate gradient with Armijo backtracking and the
// Hestenes–Stiefel rule (β⁺ restart), generic over a manifold adaptor.

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "gfm/error.hpp"

namespace gfm {

template <typename M>
concept RiemannianManifold =
    requires(const M& m, const typename M::Point& x,
             const typename M::Tangent& v,
             const typename M::EuclideanGradient& g, typename M::Scalar a) {
      { m.inner(x, v, v) } -> std::convertible_to<typename M::Scalar>;
      { m.egrad_to_rgrad(x, g) } -> std::convertible_to<typename M::Tangent>;
      { m.retract(x, v) } -> std::convertible_to<typename M::Point>;
      { m.transporter(x, x)(v) } -> std::convertible_to<typename M::Tangent>;
      { m.satisfies_constraints(x) } -> std::convertible_to<bool>;
      { a * v } -> std::convertible_to<typename M::Tangent>;
      { v + v } -> std::convertible_to<typename M::Tangent>;
      { v - v } -> std::convertible_to<typename M::Tangent>;
      { -v } -> std::convertible_to<typename M::Tangent>;
    };

template <typename C, typename M>
concept CostFunction = requires(const C& c, const typename M::Point& x) {
  { c.value(x) } -> std::convertible_to<typename M::Scalar>;
  {
    c.value_and_egrad(x)
  } -> std::convertible_to<
      std::pair<typename M::Scalar, typename M::EuclideanGradient>>;
};

struct CGConfig {
  int max_iter = 1000;
  double grad_tol = 1e-6;
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double backtrack_ratio = 0.5;
  int max_backtracks = 50;

  void validate() const {
    if (max_iter < 0 || !(grad_tol > 0) || !(step_init > 0) ||
        !(armijo_c > 0 && armijo_c < 1) ||
        !(backtrack_ratio > 0 && backtrack_ratio < 1) || max_backtracks < 0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid CG configuration");
    }
  }
};

enum class SolverStatus {
  kConverged,
  kMaxIterations,
  kLineSearchFailure,
  kNumericalFailure,
};

constexpr std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::kConverged: return "converged";
    case SolverStatus::kMaxIterations: return "max_iterations";
    case SolverStatus::kLineSearchFailure: return "line_search_failure";
    case SolverStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

struct IterationRecord {
  double objective = 0;
  double grad_norm = 0;
  double step = 0;      // accepted step size leading to this iterate
  int backtracks = 0;   // rejected trial steps before acceptance
  bool direction_reset = false;
};

/// Record 0 describes the starting point.
struct OptTrace {
  std::vector<IterationRecord> records;
  SolverStatus status = SolverStatus::kMaxIterations;

  int iterations() const { return int(records.size()) - 1; }
  const IterationRecord& last() const { return records.back(); }
};

/// β = ⟨g, g − g̃⟩ / ⟨d̃, g − g̃⟩ at the new point, clipped at 0; 0 when the
/// denominator vanishes.
template <RiemannianManifold M>
typename M::Scalar hs_beta(const M& manifold, const typename M::Point& x_new,
                           const typename M::Tangent& grad_new,
                           const typename M::Tangent& grad_old_transported,
                           const typename M::Tangent& dir_old_transported) {
  using Scalar = typename M::Scalar;
  const typename M::Tangent diff = grad_new - grad_old_transported;
  const Scalar num = manifold.inner(x_new, grad_new, diff);
  const Scalar den = manifold.inner(x_new, dir_old_transported, diff);
  if (!(std::abs(den) >= Scalar(1e-30))) return Scalar(0);
  const Scalar beta = num / den;
  return std::isfinite(double(beta)) && beta > Scalar(0) ? beta : Scalar(0);
}

template <typename Point, typename Scalar>
struct LineSearchResult {
  Scalar step;
  Point point;
  Scalar value;
  int backtracks;
};

/// Backtracking from cfg.step_init until f(R_x(α d)) ≤ f0 + c·α·slope.
/// Retraction or evaluation failures count as rejected trials.
template <RiemannianManifold M, CostFunction<M> C>
LineSearchResult<typename M::Point, typename M::Scalar> armijo_linesearch(
    const M& manifold, const C& cost, const typename M::Point& x,
    const typename M::Tangent& dir, typename M::Scalar f0,
    typename M::Scalar slope, const CGConfig& cfg) {
  using Scalar = typename M::Scalar;
  if (!(slope < Scalar(0))) {
    throw Error(ErrorCode::kInvalidArgument,
                "line search needs a descent direction (slope < 0)");
  }
  Scalar alpha(cfg.step_init);
  for (int j = 0; j <= cfg.max_backtracks; ++j, alpha *= Scalar(cfg.backtrack_ratio)) {
    std::optional<typename M::Point> trial;
    Scalar f_trial;
    try {
      trial.emplace(manifold.retract(x, alpha * dir));
      f_trial = cost.value(*trial);
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(double(f_trial)) &&
        f_trial <= f0 + Scalar(cfg.armijo_c) * alpha * slope) {
      return {alpha, std::move(*trial), f_trial, j};
    }
  }
  throw Error(ErrorCode::kLineSearchFailure,
              "Armijo condition not met within the backtracking budget");
}

template <typename Point>
struct MinimizeResult {
  Point point;
  OptTrace trace;
};

/// Riemannian conjugate gradient. Never throws once the starting point has
/// been evaluated; failures end the run with a status flag and the last
/// accepted iterate. `on_iterate`, if set, sees the start and every accepted
/// iterate.
template <RiemannianManifold M, CostFunction<M> C>
MinimizeResult<typename M::Point> minimize(
    const M& manifold, const C& cost, typename M::Point x0, const CGConfig& cfg,
    const std::function<void(const typename M::Point&)>& on_iterate = {}) {
  using Scalar = typename M::Scalar;
  using Tangent = typename M::Tangent;
  cfg.validate();

  MinimizeResult<typename M::Point> out{std::move(x0), {}};
  auto& x = out.point;
  auto& trace = out.trace;

  auto [f, egrad] = cost.value_and_egrad(x);
  Tangent grad = manifold.egrad_to_rgrad(x, egrad);
  Scalar grad_sq = manifold.inner(x, grad, grad);
  trace.records.push_back({double(f), std::sqrt(double(grad_sq)), 0.0, 0, false});
  if (on_iterate) on_iterate(x);

  Tangent dir = -grad;
  for (int iter = 0;; ++iter) {
    if (std::sqrt(double(grad_sq)) <= cfg.grad_tol) {
      trace.status = SolverStatus::kConverged;
      break;
    }
    if (iter >= cfg.max_iter) {
      trace.status = SolverStatus::kMaxIterations;
      break;
    }
    Scalar slope = manifold.inner(x, grad, dir);
    bool reset = false;
    if (!(slope < Scalar(0))) {
      dir = -grad;
      slope = -grad_sq;
      reset = true;
    }
    std::optional<LineSearchResult<typename M::Point, Scalar>> ls;
    try {
      ls.emplace(armijo_linesearch(manifold, cost, x, dir, f, slope, cfg));
    } catch (const Error&) {
      trace.status = SolverStatus::kLineSearchFailure;
      break;
    }
    try {
      auto [f_new, egrad_new] = cost.value_and_egrad(ls->point);
      (void)f_new;
      Tangent grad_new = manifold.egrad_to_rgrad(ls->point, egrad_new);
      const auto transport = manifold.transporter(x, ls->point);
      const Tangent grad_old_t = transport(grad);
      const Tangent dir_old_t = transport(dir);
      const Scalar beta =
          hs_beta(manifold, ls->point, grad_new, grad_old_t, dir_old_t);
      dir = -grad_new + beta * dir_old_t;
      grad = std::move(grad_new);
    } catch (const Error&) {
      trace.status = SolverStatus::kNumericalFailure;
      break;
    }
    x = std::move(ls->point);
    f = ls->value;
    grad_sq = manifold.inner(x, grad, grad);
    trace.records.push_back({double(f), std::sqrt(double(grad_sq)),
                             double(ls->step), ls->backtracks, reset});
    if (on_iterate) on_iterate(x);
  }
  return out;
}

}  // namespace gfm
