#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "basins/function.hpp"
#include "basins/linalg2.hpp"
#include "basins/rng.hpp"

namespace basins {

struct MethodConfig {
  std::vector<double> delta_set{0.0, 1.0, -1.0};
  double tau = 1.5;              // exponent on ||grad|| in the Hessian shift, positive
  double gamma0 = 1.0;           // initial line-search step, (0, 1]
  double theta = 0.0;            // step normalization: 0 = off, 1 = clamp to unit length
  double rho = 0.9;              // relaxation disk radius, (0.5, 1)
  Complex relax_alpha{1.0, 0.0}; // constant relaxation factor for the relaxed method
  int max_iter = 10000;
  double root_tol = 1e-6;
  double grad_tol = 1e-13;
  double escape_radius = 1e10;
  int armijo_max_halvings = 100;
  std::uint64_t seed = 0;

  // Half the minimum pairwise spacing of delta_set.
  double kappa() const;
  // Throws std::invalid_argument when a field is out of its documented range.
  void validate() const;
};

enum class StepStatus {
  Continue,
  SingularDerivative,  // denominator (f', det, ...) below 1e-300
  InvalidJet,          // overflow guard or pole in the evaluation
  ArmijoStalled,       // no acceptable step within armijo_max_halvings
  GradientVanished,    // ||grad F|| <= grad_tol; z is left unchanged
};

struct StepOutcome {
  Complex next;
  StepStatus status = StepStatus::Continue;
};

enum class RunStatus {
  ConvergedToRoot,
  ConvergedToNonRootCritical,
  Diverged,
  Exhausted,
  Error,
};

struct RunResult {
  Complex terminal;
  int iterations = 0;
  RunStatus status = RunStatus::Exhausted;
  int root_index = -1;               // set when status == ConvergedToRoot
  StepStatus error_kind = StepStatus::Continue;  // set when status == Error
};

// alpha = 1 + rho*sqrt(u)*e^{i phi}: uniform on the disk |alpha - 1| <= rho.
Complex sample_alpha(RandomStream& stream, double rho);

StepOutcome newton_step(const FunctionExpr& fn, Complex z);
StepOutcome relaxed_newton_step(const FunctionExpr& fn, Complex z, Complex alpha);
StepOutcome random_relaxed_newton_step(const FunctionExpr& fn, Complex z, RandomStream& stream,
                                       double rho);
StepOutcome newton_opt_step(const FunctionExpr& fn, Complex z);

struct DeltaChoice {
  int index = 0;
  Sym2 a;  // hessian + delta * ||grad||^tau * Id
};

// First delta in delta_set with minsp(A) >= kappa * grad_norm^tau. With at
// least three pairwise-distinct deltas at most two can fail, so index <= 2.
DeltaChoice select_delta(const Sym2& hessian, double grad_norm, const MethodConfig& cfg);

struct ArmijoResult {
  double gamma = 0.0;
  bool stalled = false;
};

// Largest gamma in {gamma0 / 3^k} with
//   F(z - gamma*w) - F(z) <= -gamma * <w, grad F(z)> / 3.
ArmijoResult armijo_search(const FunctionExpr& fn, Complex z, Vec2 w, double gamma0,
                           int max_halvings);

StepOutcome nqn_step(const FunctionExpr& fn, Complex z, const MethodConfig& cfg);
StepOutcome bnqn_step(const FunctionExpr& fn, Complex z, const MethodConfig& cfg);

enum class StepKind { Newton, Relaxed, RandomRelaxed, NewtonOpt, Nqn, Bnqn };

// Iterates the chosen step from z0, stopping on: proximity to a listed root
// (ConvergedToRoot; nearest index), a vanished gradient away from all roots
// (ConvergedToNonRootCritical), |z| > escape_radius (Diverged), a step error
// (Error), or max_iter (Exhausted). `stream` is required for RandomRelaxed.
RunResult run_method(StepKind kind, const FunctionExpr& fn, Complex z0, const MethodConfig& cfg,
                     std::span<const Complex> roots, RandomStream* stream = nullptr);

// Same loop, but the function may change between iterations (iteration k uses
// fn_at(k)); used for the stochastically perturbed runs. Proximity stops skip
// the residual certificate since the perturbed residual never falls below the
// noise floor.
RunResult run_method_seq(StepKind kind, const std::function<FunctionExpr(int)>& fn_at, Complex z0,
                         const MethodConfig& cfg, std::span<const Complex> roots,
                         RandomStream* stream = nullptr);

}  // namespace basins
