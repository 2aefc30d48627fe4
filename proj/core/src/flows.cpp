#include "basins/flows.hpp"

#include <limits>
#include <stdexcept>

namespace basins {

namespace {

bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

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

}  // namespace

void IntegratorConfig::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (h > t_end) throw std::invalid_argument("h must not exceed t_end");
  if (!(rel_tol > 0.0 && abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(root_tol > 0.0)) throw std::invalid_argument("root_tol must be positive");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(escape_radius > 0.0)) throw std::invalid_argument("escape_radius must be positive");
}

FlowVelocity flow_rhs(FlowKind kind, const FunctionExpr& fn, Complex z) {
  switch (kind) {
    case FlowKind::Plain: {
      const Jet2 j = eval_jet(fn, z);
      if (!j.valid || std::abs(j.df) < kSingularDenominator) return {{}, false};
      const Complex v = -j.f / j.df;
      return {v, finite(v)};
    }
    case FlowKind::Fraction: {
      const Jet2 j = eval_jet(fn, z);
      if (!j.valid) return {{}, false};
      const Complex den = j.df * j.df - j.f * j.d2f;
      if (std::abs(den) < kSingularDenominator) return {{}, false};
      const Complex v = -j.f * j.df / den;
      return {v, finite(v)};
    }
    case FlowKind::Optimization: {
      const ObjectiveJet oj = objective_jet(fn, z);
      if (!oj.valid) return {{}, false};
      const double d = det(oj.hessian);
      if (std::abs(d) < kSingularDenominator) return {{}, false};
      const Vec2 g = oj.gradient;
      const Complex v{-(oj.hessian.a22 * g.x - oj.hessian.a12 * g.y) / d,
                      -(oj.hessian.a11 * g.y - oj.hessian.a12 * g.x) / d};
      return {v, finite(v)};
    }
  }
  throw std::logic_error("unreachable");
}

FlowRunResult integrate_flow(FlowKind kind, const FunctionExpr& fn, Complex z0,
                             const IntegratorConfig& cfg, std::span<const Complex> roots) {
  cfg.validate();
  auto rhs = [&](Complex y) { return flow_rhs(kind, fn, y); };

  Complex z = z0;
  double t = 0.0;
  double h = cfg.h;
  int steps = 0;
  int consecutive_rejects = 0;

  for (;;) {
    double dist = 0.0;
    const int idx = nearest_root(roots, z, dist);
    if (idx >= 0 && dist < cfg.root_tol) {
      return {z, steps, RunStatus::ConvergedToRoot, idx, t};
    }
    if (kind == FlowKind::Optimization) {
      const ObjectiveJet oj = objective_jet(fn, z);
      if (oj.valid && norm(oj.gradient) <= cfg.grad_tol) {
        return {z, steps, RunStatus::ConvergedToNonRootCritical, -1, t};
      }
    }
    if (!(std::abs(z) <= cfg.escape_radius)) {
      return {z, steps, RunStatus::Diverged, -1, t};
    }
    if (t >= cfg.t_end * (1.0 - 1e-12)) break;

    const double hs = std::min(h, cfg.t_end - t);
    if (cfg.stepper == IntegratorConfig::Stepper::RK4) {
      const StepValue sv = rk4_step(rhs, z, hs);
      if (!sv.valid) {
        return {z, steps, RunStatus::Error, -1, t, StepStatus::InvalidJet};
      }
      z = sv.y;
      t += hs;
      ++steps;
    } else {
      const Dp54Step ds = dp54_step(rhs, z, hs, cfg.rel_tol, cfg.abs_tol);
      if (!ds.valid) {
        return {z, steps, RunStatus::Error, -1, t, StepStatus::InvalidJet};
      }
      if (ds.accepted) {
        z = ds.y_next;
        t += hs;
        ++steps;
        consecutive_rejects = 0;
      } else if (++consecutive_rejects > 60 || ds.h_next < 1e-12) {
        return {z, steps, RunStatus::Error, -1, t, StepStatus::SingularDerivative};
      }
      h = ds.h_next;
    }
  }
  return {z, steps, RunStatus::Exhausted, -1, t};
}

}  // namespace basins
