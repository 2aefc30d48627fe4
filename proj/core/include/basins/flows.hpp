#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "basins/function.hpp"
#include "basins/methods.hpp"

namespace basins {

enum class FlowKind { Plain, Fraction, Optimization };

struct IntegratorConfig {
  enum class Stepper { RK4, DP54 };
  Stepper stepper = Stepper::RK4;
  double h = 0.01;        // fixed step for RK4, initial step for DP54
  double t_end = 100.0;
  double rel_tol = 1e-8;  // DP54 only
  double abs_tol = 1e-10; // DP54 only
  double root_tol = 1e-3;
  // Optimization-flow equilibrium stop. Looser than the iterative methods'
  // grad_tol: the discrete trajectory freezes once h*|velocity| drops below
  // one ulp of the iterate, which floors |grad F| near 1e-12 for O(1)
  // functions; 1e-13 would never fire.
  double grad_tol = 1e-8;
  double escape_radius = 1e10;

  void validate() const;
};

struct FlowVelocity {
  Complex v;
  bool valid = true;
};

// Right-hand sides: Plain dz/dt = -f/f', Fraction dz/dt = -f f'/((f')^2 - f f''),
// Optimization dz/dt = -(grad^2 F)^-1 grad F. invalid when the denominator
// magnitude falls below 1e-300 or the jet is invalid.
FlowVelocity flow_rhs(FlowKind kind, const FunctionExpr& fn, Complex z);

struct StepValue {
  Complex y;
  bool valid = true;
};

// Classical fixed-step fourth-order Runge-Kutta for an autonomous RHS.
template <class Rhs>
StepValue rk4_step(Rhs&& rhs, Complex y, double h) {
  const FlowVelocity k1 = rhs(y);
  if (!k1.valid) return {y, false};
  const FlowVelocity k2 = rhs(y + 0.5 * h * k1.v);
  if (!k2.valid) return {y, false};
  const FlowVelocity k3 = rhs(y + 0.5 * h * k2.v);
  if (!k3.valid) return {y, false};
  const FlowVelocity k4 = rhs(y + h * k3.v);
  if (!k4.valid) return {y, false};
  return {y + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v), true};
}

struct Dp54Step {
  Complex y_next;      // fifth-order candidate; meaningful when valid
  double h_next = 0.0; // suggested next step (shrunken on rejection)
  bool accepted = false;
  bool valid = true;
};

// One embedded Dormand-Prince 5(4) attempt. The error estimate is measured
// against abs_tol + rel_tol * max(|y|, |y_next|); the next step size follows
// the standard 0.9 * (1/err)^(1/5) rule clamped to [0.2, 5] times h.
template <class Rhs>
Dp54Step dp54_step(Rhs&& rhs, Complex y, double h, double rel_tol, double abs_tol) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                   e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

  Dp54Step out;
  const FlowVelocity k1 = rhs(y);
  if (!k1.valid) return {y, 0.0, false, false};
  const FlowVelocity k2 = rhs(y + h * (a21 * k1.v));
  if (!k2.valid) return {y, 0.0, false, false};
  const FlowVelocity k3 = rhs(y + h * (a31 * k1.v + a32 * k2.v));
  if (!k3.valid) return {y, 0.0, false, false};
  const FlowVelocity k4 = rhs(y + h * (a41 * k1.v + a42 * k2.v + a43 * k3.v));
  if (!k4.valid) return {y, 0.0, false, false};
  const FlowVelocity k5 = rhs(y + h * (a51 * k1.v + a52 * k2.v + a53 * k3.v + a54 * k4.v));
  if (!k5.valid) return {y, 0.0, false, false};
  const FlowVelocity k6 =
      rhs(y + h * (a61 * k1.v + a62 * k2.v + a63 * k3.v + a64 * k4.v + a65 * k5.v));
  if (!k6.valid) return {y, 0.0, false, false};

  const Complex y5 = y + h * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v);
  const FlowVelocity k7 = rhs(y5);
  if (!k7.valid) return {y, 0.0, false, false};
  const Complex y4 =
      y + h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);

  const double scale = abs_tol + rel_tol * std::max(std::abs(y), std::abs(y5));
  const double err = std::abs(y5 - y4) / scale;
  out.y_next = y5;
  out.accepted = err <= 1.0;
  const double raw = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
  out.h_next = std::clamp(raw, 0.2, 5.0) * h;
  if (!std::isfinite(err)) {
    out.accepted = false;
    out.h_next = 0.2 * h;
  }
  return out;
}

struct FlowRunResult {
  Complex terminal;
  int steps = 0;  // accepted steps
  RunStatus status = RunStatus::Exhausted;
  int root_index = -1;
  double t_reached = 0.0;
  StepStatus error_kind = StepStatus::Continue;
};

// Integrates the flow from z0 until a root is within root_tol, the gradient
// vanishes (Optimization kind only), the trajectory escapes, the RHS turns
// invalid, or t reaches t_end.
FlowRunResult integrate_flow(FlowKind kind, const FunctionExpr& fn, Complex z0,
                             const IntegratorConfig& cfg, std::span<const Complex> roots);

}  // namespace basins
