#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "basins/linalg2.hpp"

namespace basins {

using Complex = std::complex<double>;

// Any intermediate magnitude above this flags the jet invalid instead of
// letting overflow propagate; denominators below kSingularDenominator count
// as singular.
inline constexpr double kMagnitudeGuard = 1e150;
inline constexpr double kSingularDenominator = 1e-300;

struct RootSpec {
  Complex location;
  int multiplicity = 1;
};

// Value and first two derivatives at a point. valid=false means a pole or an
// overflow guard tripped; the numeric fields are then meaningless.
struct Jet2 {
  Complex f;
  Complex df;
  Complex d2f;
  bool valid = true;
};

// Jet of the objective |f|^2 / 2 as a function of (Re z, Im z).
struct ObjectiveJet {
  double value = 0.0;
  Vec2 gradient;
  Sym2 hessian;
  bool valid = true;
};

enum class ExprKind { PolyFromRoots, PolyCoeffs, TranscendentalF23, TimesExp, NewtonQuotient };

// Immutable expression describing the function under study. Polynomials given
// by roots are expanded to monic coefficients once at construction and
// evaluated by Horner's scheme afterwards.
class FunctionExpr {
 public:
  static FunctionExpr poly_from_roots(std::vector<RootSpec> roots);
  static FunctionExpr poly_coeffs(std::vector<Complex> coeffs);  // ascending order
  static FunctionExpr transcendental_f23();
  static FunctionExpr times_exp(FunctionExpr inner);       // inner(z) * e^z
  static FunctionExpr newton_quotient(FunctionExpr inner); // inner / inner'

  ExprKind kind() const { return kind_; }
  const std::vector<RootSpec>& roots() const { return roots_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  const FunctionExpr& inner() const { return *inner_; }

  // Polynomial degree, or -1 for transcendental / quotient expressions.
  int degree() const;

 private:
  FunctionExpr() = default;
  ExprKind kind_ = ExprKind::PolyCoeffs;
  std::vector<RootSpec> roots_;    // PolyFromRoots only
  std::vector<Complex> coeffs_;    // PolyFromRoots (expanded) and PolyCoeffs
  std::shared_ptr<const FunctionExpr> inner_;
};

// Monic expansion of prod (z - r_i)^{m_i}, ascending coefficients.
// Total degree must be in [1, 64].
std::vector<Complex> expand_roots_to_coeffs(const std::vector<RootSpec>& roots);

// Catalog entries "f1".."f25". Throws std::invalid_argument for unknown ids.
FunctionExpr catalog_lookup(const std::string& id);

Jet2 eval_jet(const FunctionExpr& fn, Complex z);

// Value-only evaluation (cheaper than a full jet; used by the line search).
Complex eval_f(const FunctionExpr& fn, Complex z, bool& valid);

ObjectiveJet objective_jet(const FunctionExpr& fn, Complex z);

// |f(z)|^2 / 2 without derivatives.
double objective_value(const FunctionExpr& fn, Complex z, bool& valid);

// Distinct root locations in first-occurrence order, multiplicity disregarded.
// Known for PolyFromRoots, the transcendental catalog entry (reference roots),
// and transforms of those; empty for bare PolyCoeffs.
std::vector<Complex> distinct_roots(const FunctionExpr& fn);

}  // namespace basins
