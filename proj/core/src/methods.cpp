#include "basins/methods.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace basins {

namespace {

// A proximity stop only counts as ConvergedToRoot if the iterate certifies a
// genuine root: |f * f'| (which equals ||grad F||) must be below this bound.
// A marginal landing just inside root_tol takes one more step instead.
constexpr double kTerminalResidual = 1e-4;

constexpr double kPi = 3.14159265358979323846;

Complex to_complex(Vec2 v) { return {v.x, v.y}; }

int nearest_root(std::span<const Complex> roots, Complex z, double& dist) {
  int best = -1;
  dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double d = std::abs(z - roots[i]);
    if (d < dist) {
      dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

bool residual_certified(const FunctionExpr& fn, Complex z) {
  const Jet2 j = eval_jet(fn, z);
  return j.valid && std::abs(j.f) * std::abs(j.df) < kTerminalResidual;
}

StepOutcome do_step(StepKind kind, const FunctionExpr& fn, Complex z, const MethodConfig& cfg,
                    RandomStream* stream) {
  switch (kind) {
    case StepKind::Newton: return newton_step(fn, z);
    case StepKind::Relaxed: return relaxed_newton_step(fn, z, cfg.relax_alpha);
    case StepKind::RandomRelaxed: return random_relaxed_newton_step(fn, z, *stream, cfg.rho);
    case StepKind::NewtonOpt: return newton_opt_step(fn, z);
    case StepKind::Nqn: return nqn_step(fn, z, cfg);
    case StepKind::Bnqn: return bnqn_step(fn, z, cfg);
  }
  throw std::logic_error("unreachable");
}

template <class FnAt>
RunResult run_loop(StepKind kind, FnAt&& fn_at, Complex z0, const MethodConfig& cfg,
                   std::span<const Complex> roots, RandomStream* stream, bool certify_residual) {
  Complex z = z0;
  for (int k = 0;; ++k) {
    double dist = 0.0;
    const int idx = nearest_root(roots, z, dist);
    if (idx >= 0 && dist < cfg.root_tol &&
        (!certify_residual || residual_certified(fn_at(k), z))) {
      return {z, k, RunStatus::ConvergedToRoot, idx};
    }
    // Inverted comparison so a non-finite iterate also counts as divergence.
    if (!(std::abs(z) <= cfg.escape_radius)) return {z, k, RunStatus::Diverged};
    if (k == cfg.max_iter) break;

    // newton_opt_step has no tolerance parameter, so its gradient stop lives
    // here; nqn/bnqn report GradientVanished from the step itself.
    if (kind == StepKind::NewtonOpt) {
      const ObjectiveJet oj = objective_jet(fn_at(k), z);
      if (oj.valid && norm(oj.gradient) <= cfg.grad_tol) {
        if (idx >= 0 && dist < cfg.root_tol) return {z, k, RunStatus::ConvergedToRoot, idx};
        return {z, k, RunStatus::ConvergedToNonRootCritical};
      }
    }

    const StepOutcome so = do_step(kind, fn_at(k), z, cfg, stream);
    switch (so.status) {
      case StepStatus::Continue:
        z = so.next;
        break;
      case StepStatus::GradientVanished:
        // Root proximity wins when both stopping conditions hold; a vanished
        // gradient at a root trivially satisfies the residual certificate.
        if (idx >= 0 && dist < cfg.root_tol) return {z, k, RunStatus::ConvergedToRoot, idx};
        return {z, k, RunStatus::ConvergedToNonRootCritical};
      default:
        return {z, k, RunStatus::Error, -1, so.status};
    }
  }
  return {z, cfg.max_iter, RunStatus::Exhausted};
}

}  // namespace

double MethodConfig::kappa() const {
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < delta_set.size(); ++i) {
    for (std::size_t j = i + 1; j < delta_set.size(); ++j) {
      min_gap = std::min(min_gap, std::abs(delta_set[i] - delta_set[j]));
    }
  }
  return 0.5 * min_gap;
}

void MethodConfig::validate() const {
  if (delta_set.size() < 3) throw std::invalid_argument("delta_set needs at least 3 entries");
  if (!(kappa() > 0.0)) throw std::invalid_argument("delta_set entries must be pairwise distinct");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(gamma0 > 0.0 && gamma0 <= 1.0)) throw std::invalid_argument("gamma0 must be in (0, 1]");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be nonnegative");
  if (!(rho > 0.5 && rho < 1.0)) throw std::invalid_argument("rho must be in (0.5, 1)");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(root_tol > 0.0)) throw std::invalid_argument("root_tol must be positive");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(escape_radius > 0.0)) throw std::invalid_argument("escape_radius must be positive");
  if (armijo_max_halvings < 1) throw std::invalid_argument("armijo_max_halvings must be >= 1");
}

Complex sample_alpha(RandomStream& stream, double rho) {
  const double u = stream.uniform();
  const double phi = 2.0 * kPi * stream.uniform();
  const double r = rho * std::sqrt(u);
  return {1.0 + r * std::cos(phi), r * std::sin(phi)};
}

StepOutcome newton_step(const FunctionExpr& fn, Complex z) {
  const Jet2 j = eval_jet(fn, z);
  if (!j.valid) return {z, StepStatus::InvalidJet};
  if (std::abs(j.df) < kSingularDenominator) return {z, StepStatus::SingularDerivative};
  return {z - j.f / j.df, StepStatus::Continue};
}

StepOutcome relaxed_newton_step(const FunctionExpr& fn, Complex z, Complex alpha) {
  const Jet2 j = eval_jet(fn, z);
  if (!j.valid) return {z, StepStatus::InvalidJet};
  if (std::abs(j.df) < kSingularDenominator) return {z, StepStatus::SingularDerivative};
  return {z - alpha * (j.f / j.df), StepStatus::Continue};
}

StepOutcome random_relaxed_newton_step(const FunctionExpr& fn, Complex z, RandomStream& stream,
                                       double rho) {
  return relaxed_newton_step(fn, z, sample_alpha(stream, rho));
}

StepOutcome newton_opt_step(const FunctionExpr& fn, Complex z) {
  const ObjectiveJet oj = objective_jet(fn, z);
  if (!oj.valid) return {z, StepStatus::InvalidJet};
  const double d = det(oj.hessian);
  if (std::abs(d) < kSingularDenominator) return {z, StepStatus::SingularDerivative};
  const Vec2 g = oj.gradient;
  const Vec2 s{(oj.hessian.a22 * g.x - oj.hessian.a12 * g.y) / d,
               (oj.hessian.a11 * g.y - oj.hessian.a12 * g.x) / d};
  return {z - to_complex(s), StepStatus::Continue};
}

DeltaChoice select_delta(const Sym2& hessian, double grad_norm, const MethodConfig& cfg) {
  const double gt = std::pow(grad_norm, cfg.tau);
  if (!std::isfinite(gt)) throw std::domain_error("select_delta: gradient scale overflow");
  const double threshold = cfg.kappa() * gt;
  for (std::size_t j = 0; j < cfg.delta_set.size(); ++j) {
    const Sym2 a = hessian + (cfg.delta_set[j] * gt) * Sym2::identity();
    if (minsp(a) >= threshold) return {static_cast<int>(j), a};
  }
  // Each Hessian eigenvalue disqualifies at most one delta (the deltas are
  // 2*kappa apart), so three distinct deltas always leave one acceptable.
  throw std::logic_error("select_delta: no acceptable delta");
}

ArmijoResult armijo_search(const FunctionExpr& fn, Complex z, Vec2 w, double gamma0,
                           int max_halvings) {
  const ObjectiveJet oj = objective_jet(fn, z);
  if (!oj.valid) return {0.0, true};
  const double slope = dot(w, oj.gradient);
  double gamma = gamma0;
  for (int k = 0; k <= max_halvings; ++k) {
    bool ok = true;
    const double ft = objective_value(fn, z - gamma * to_complex(w), ok);
    if (ok && ft - oj.value <= -gamma * slope / 3.0) return {gamma, false};
    gamma /= 3.0;
  }
  return {0.0, true};
}

StepOutcome nqn_step(const FunctionExpr& fn, Complex z, const MethodConfig& cfg) {
  const ObjectiveJet oj = objective_jet(fn, z);
  if (!oj.valid) return {z, StepStatus::InvalidJet};
  const double gnorm = norm(oj.gradient);
  if (gnorm <= cfg.grad_tol) return {z, StepStatus::GradientVanished};
  const double gt = std::pow(gnorm, cfg.tau);
  if (!std::isfinite(gt)) return {z, StepStatus::InvalidJet};
  for (double delta : cfg.delta_set) {
    const Sym2 a = oj.hessian + (delta * gt) * Sym2::identity();
    if (std::abs(det(a)) > kSingularDenominator) {
      if (minsp(a) < kSingularDenominator) break;  // solvable in theory, not in doubles
      const Vec2 w = reflect_abs_solve(a, oj.gradient);
      return {z - to_complex(w), StepStatus::Continue};
    }
  }
  return {z, StepStatus::SingularDerivative};
}

StepOutcome bnqn_step(const FunctionExpr& fn, Complex z, const MethodConfig& cfg) {
  const ObjectiveJet oj = objective_jet(fn, z);
  if (!oj.valid) return {z, StepStatus::InvalidJet};
  const double gnorm = norm(oj.gradient);
  if (gnorm <= cfg.grad_tol) return {z, StepStatus::GradientVanished};
  const double gt = std::pow(gnorm, cfg.tau);
  if (!std::isfinite(gt)) return {z, StepStatus::InvalidJet};
  if (cfg.kappa() * gt < kSingularDenominator) return {z, StepStatus::SingularDerivative};
  const DeltaChoice dc = select_delta(oj.hessian, gnorm, cfg);
  Vec2 w = reflect_abs_solve(dc.a, oj.gradient);
  const double scale = std::max(1.0, cfg.theta * norm(w));
  w = (1.0 / scale) * w;
  const ArmijoResult ar = armijo_search(fn, z, w, cfg.gamma0, cfg.armijo_max_halvings);
  if (ar.stalled) return {z, StepStatus::ArmijoStalled};
  return {z - ar.gamma * to_complex(w), StepStatus::Continue};
}

RunResult run_method(StepKind kind, const FunctionExpr& fn, Complex z0, const MethodConfig& cfg,
                     std::span<const Complex> roots, RandomStream* stream) {
  cfg.validate();
  if (kind == StepKind::RandomRelaxed && stream == nullptr) {
    throw std::invalid_argument("run_method: RandomRelaxed needs a RandomStream");
  }
  return run_loop(
      kind, [&](int) -> const FunctionExpr& { return fn; }, z0, cfg, roots, stream, true);
}

RunResult run_method_seq(StepKind kind, const std::function<FunctionExpr(int)>& fn_at, Complex z0,
                         const MethodConfig& cfg, std::span<const Complex> roots,
                         RandomStream* stream) {
  cfg.validate();
  if (kind == StepKind::RandomRelaxed && stream == nullptr) {
    throw std::invalid_argument("run_method_seq: RandomRelaxed needs a RandomStream");
  }
  std::optional<FunctionExpr> current;
  auto at = [&](int k) -> const FunctionExpr& {
    current = fn_at(k);
    return *current;
  };
  return run_loop(kind, at, z0, cfg, roots, stream, false);
}

}  // namespace basins
