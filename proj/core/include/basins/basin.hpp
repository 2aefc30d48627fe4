#pragma once

#include <optional>

#include "basins/flows.hpp"
#include "basins/function.hpp"
#include "basins/grid.hpp"
#include "basins/methods.hpp"
#include "basins/rng.hpp"

namespace basins {

enum class Engine {
  Newton,
  Relaxed,
  RandomRelaxed,
  NewtonOpt,
  Nqn,
  Bnqn,
  BnqnV2,  // Bnqn with theta forced to 1
  FlowPlain,
  FlowFraction,
  FlowOpt,
  Voronoi,
};

// Additive noise f(z) + epsilon * xi_n * (z^3 + 2z - 5) redrawn every
// iteration. Root classification then uses relaxed_root_tol, since iterates
// can only rattle within the noise floor of a root.
struct StochasticSpec {
  double epsilon = 1e-4;
  double relaxed_root_tol = 1e-3;  // keep >= 10 * epsilon

  void validate() const;
};

// Returns fn's coefficients perturbed by the next draw of `noise`; fn must be
// a polynomial. With epsilon == 0 the coefficients come back bit-identical.
FunctionExpr stochastic_wrap(const FunctionExpr& fn, const StochasticSpec& spec,
                             RandomStream& noise);

// Roots used to classify terminals: the distinct roots of fn, Newton-polished
// when fn is transcendental-based (the reference values are 8-decimal seeds).
std::vector<Complex> classification_targets(const FunctionExpr& fn);

struct SweepConfig {
  MethodConfig method;
  IntegratorConfig integrator;
  GridSpec grid;
  std::optional<StochasticSpec> stochastic;
  int threads = 1;
};

// Runs the engine once per pixel. Pixel (ix, iy) starts from
// grid.pixel_center(ix, iy) with its own random streams derived from
// (method.seed, pixel index), so the output is independent of the thread
// count and of pixel execution order. Pixels whose run does not certify a
// root get kBlackLabel; per-pixel errors never abort the sweep.
BasinImage sweep(Engine engine, const FunctionExpr& fn, const SweepConfig& cfg);

// Fraction of pixels whose labels differ. With ignore_black, pixels black in
// either image are excluded from both numerator and denominator (0/0 counts
// as agreement). Throws std::invalid_argument on dimension mismatch.
double compare_images(const BasinImage& a, const BasinImage& b, bool ignore_black);

}  // namespace basins
