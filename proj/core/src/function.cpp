#include "basins/function.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace basins {

namespace {

bool too_big(Complex v) {
  // Written so NaN also fails the test.
  return !(std::abs(v.real()) <= kMagnitudeGuard && std::abs(v.imag()) <= kMagnitudeGuard);
}

// Value and first three derivatives; the third is needed to form the 2-jet of
// a Newton quotient f/f'.
struct Jet3 {
  Complex f, df, d2f, d3f;
  bool valid = true;
};

Jet3 invalid_jet3() {
  Jet3 j;
  j.valid = false;
  return j;
}

// One-pass Horner evaluation of p, p', p'', p''' (generalized synthetic
// division; the accumulators carry p''/2 and p'''/6).
Jet3 poly_jet3(const std::vector<Complex>& c, Complex z) {
  const std::size_t n = c.size();
  Complex b = c[n - 1], d1 = 0.0, d2 = 0.0, d3 = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) {
    d3 = d3 * z + d2;
    d2 = d2 * z + d1;
    d1 = d1 * z + b;
    b = b * z + c[k];
  }
  Jet3 j{b, d1, 2.0 * d2, 6.0 * d3};
  if (too_big(j.f) || too_big(j.df) || too_big(j.d2f) || too_big(j.d3f)) return invalid_jet3();
  return j;
}

Complex poly_value(const std::vector<Complex>& c, Complex z) {
  Complex b = c[c.size() - 1];
  for (std::size_t k = c.size() - 1; k-- > 0;) b = b * z + c[k];
  return b;
}

constexpr Complex kF23Shift{1.0, 0.5};  // f23(z) = z^2 + cos z + 2 sin z - (1 + 0.5i)

Jet3 f23_jet3(Complex z) {
  const Complex c = std::cos(z);
  const Complex s = std::sin(z);
  Jet3 j;
  j.f = z * z + c + 2.0 * s - kF23Shift;
  j.df = 2.0 * z - s + 2.0 * c;
  j.d2f = 2.0 - c - 2.0 * s;
  j.d3f = s - 2.0 * c;
  if (too_big(j.f) || too_big(j.df) || too_big(j.d2f) || too_big(j.d3f)) return invalid_jet3();
  return j;
}

Jet3 jet3(const FunctionExpr& fn, Complex z);

Jet3 times_exp_jet3(const FunctionExpr& inner, Complex z) {
  const Jet3 i = jet3(inner, z);
  if (!i.valid) return invalid_jet3();
  const Complex e = std::exp(z);
  const double mag = std::abs(e);
  // A vanishing exponential would turn every jet entry into 0/0 fodder for
  // the quotient-based methods, so flag it alongside overflow.
  if (!(mag >= 1e-150 && mag <= kMagnitudeGuard)) return invalid_jet3();
  Jet3 j;
  j.f = i.f * e;
  j.df = (i.f + i.df) * e;
  j.d2f = (i.f + 2.0 * i.df + i.d2f) * e;
  j.d3f = (i.f + 3.0 * i.df + 3.0 * i.d2f + i.d3f) * e;
  if (too_big(j.f) || too_big(j.df) || too_big(j.d2f) || too_big(j.d3f)) return invalid_jet3();
  return j;
}

Jet3 jet3(const FunctionExpr& fn, Complex z) {
  switch (fn.kind()) {
    case ExprKind::PolyFromRoots:
    case ExprKind::PolyCoeffs:
      return poly_jet3(fn.coeffs(), z);
    case ExprKind::TranscendentalF23:
      return f23_jet3(z);
    case ExprKind::TimesExp:
      return times_exp_jet3(fn.inner(), z);
    case ExprKind::NewtonQuotient:
      // Never reached: quotients are not nestable and callers needing a
      // 2-jet of a quotient go through eval_jet.
      throw std::logic_error("jet3 of a Newton quotient is not defined");
  }
  throw std::logic_error("unreachable");
}

const std::array<Complex, 8>& f23_reference_roots() {
  static const std::array<Complex, 8> roots = {{
      {0.01453348, 0.24577632},
      {-1.79690338, -0.16311646},
      {2.65293461, -2.52795741},
      {2.70778504, 2.4386467},
      {-7.27782023, -4.1230358},
      {-7.26685729, 4.13462414},
      {9.62682067, -4.62305718},
      {9.63392763, 4.61683271},
  }};
  return roots;
}

std::vector<RootSpec> catalog_roots(int n) {
  auto r = [](double re, double im, int mult = 1) { return RootSpec{{re, im}, mult}; };
  switch (n) {
    case 1: return {r(0, 0), r(0, 1), r(3, 2)};
    case 2: return {r(0, 0), r(0, 1), r(0, 3)};
    case 3: return {r(0, 0), r(0, 1, 2)};
    case 4: return {r(0, 0), r(0, 1), r(3, 2), r(1, 4)};
    case 5: return {r(0, 0), r(0, 1), r(3, 2), r(2, 4)};
    case 6: return {r(0, 0), r(0, 1, 3)};
    case 7: return {r(0, 0), r(0, 1), r(1, 1), r(3, 2)};
    case 8: return {r(0, 0), r(0, 1), r(0, 2), r(3, 2)};
    case 9: return {r(0, 0, 2), r(0, 1, 2)};
    case 10: return {r(0, 0, 2), r(0, 1), r(1, 1)};
    case 11: return {r(0, 0, 2), r(0, 1), r(0, 2)};
    case 12: return {r(0, 0), r(0, 1), r(0, 5), r(3, 2)};
    case 13: return {r(0, 0, 2), r(0, 1), r(0, 5)};
    case 14: return {r(0, 0), r(0, 2), r(3, -3), r(3, 6), r(5, 2)};
    case 15: return {r(0, 0), r(0, 2), r(3, 6), r(5, 2), r(7, -1)};
    case 16: return {r(0, 0), r(3, 6), r(5, 2), r(7, -1), r(4, 3.4)};
    case 17: return {r(0, 0), r(0, 2), r(5, 2), r(3, -3), r(2, 1)};
    case 18: return {r(0, 0), r(3, 6), r(5, 2), r(7, -1), r(2, 1)};
    case 19: return {r(0, 0, 2), r(5, 2), r(3, -3), r(7, -1)};
    case 20: return {r(0, 0, 2), r(2, 1), r(5, 2), r(3, -3)};
    case 21: return {r(0, 0, 2), r(2, 1), r(5, 2), r(3, 6)};
    case 22: return {r(0, 0), r(2, 1, 2), r(3, -3), r(3, 6)};
    default: break;
  }
  throw std::logic_error("catalog_roots: bad index");
}

}  // namespace

FunctionExpr FunctionExpr::poly_from_roots(std::vector<RootSpec> roots) {
  FunctionExpr fn;
  fn.kind_ = ExprKind::PolyFromRoots;
  fn.coeffs_ = expand_roots_to_coeffs(roots);
  fn.roots_ = std::move(roots);
  return fn;
}

FunctionExpr FunctionExpr::poly_coeffs(std::vector<Complex> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("poly_coeffs: empty coefficient list");
  FunctionExpr fn;
  fn.kind_ = ExprKind::PolyCoeffs;
  fn.coeffs_ = std::move(coeffs);
  return fn;
}

FunctionExpr FunctionExpr::transcendental_f23() {
  FunctionExpr fn;
  fn.kind_ = ExprKind::TranscendentalF23;
  return fn;
}

FunctionExpr FunctionExpr::times_exp(FunctionExpr inner) {
  if (inner.kind_ == ExprKind::NewtonQuotient) {
    throw std::invalid_argument("times_exp: cannot wrap a Newton quotient");
  }
  FunctionExpr fn;
  fn.kind_ = ExprKind::TimesExp;
  fn.inner_ = std::make_shared<const FunctionExpr>(std::move(inner));
  return fn;
}

FunctionExpr FunctionExpr::newton_quotient(FunctionExpr inner) {
  if (inner.kind_ == ExprKind::NewtonQuotient) {
    throw std::invalid_argument("newton_quotient: quotients do not nest");
  }
  FunctionExpr fn;
  fn.kind_ = ExprKind::NewtonQuotient;
  fn.inner_ = std::make_shared<const FunctionExpr>(std::move(inner));
  return fn;
}

int FunctionExpr::degree() const {
  switch (kind_) {
    case ExprKind::PolyFromRoots:
    case ExprKind::PolyCoeffs:
      return static_cast<int>(coeffs_.size()) - 1;
    default:
      return -1;
  }
}

std::vector<Complex> expand_roots_to_coeffs(const std::vector<RootSpec>& roots) {
  long degree = 0;
  for (const RootSpec& r : roots) {
    if (r.multiplicity < 1) throw std::invalid_argument("expand_roots_to_coeffs: multiplicity < 1");
    degree += r.multiplicity;
  }
  if (degree < 1 || degree > 64) {
    throw std::invalid_argument("expand_roots_to_coeffs: total degree must be in [1, 64]");
  }
  std::vector<Complex> c{1.0};
  c.reserve(static_cast<std::size_t>(degree) + 1);
  for (const RootSpec& r : roots) {
    for (int m = 0; m < r.multiplicity; ++m) {
      c.push_back(0.0);
      for (std::size_t k = c.size() - 1; k-- > 0;) {
        c[k + 1] += c[k];
        c[k] *= -r.location;
      }
    }
  }
  return c;
}

FunctionExpr catalog_lookup(const std::string& id) {
  if (id.size() < 2 || id[0] != 'f') throw std::invalid_argument("unknown function id: " + id);
  int n = 0;
  for (std::size_t k = 1; k < id.size(); ++k) {
    if (id[k] < '0' || id[k] > '9') throw std::invalid_argument("unknown function id: " + id);
    n = n * 10 + (id[k] - '0');
  }
  if (n >= 1 && n <= 22) return FunctionExpr::poly_from_roots(catalog_roots(n));
  if (n == 23) return FunctionExpr::transcendental_f23();
  if (n == 24) return FunctionExpr::times_exp(FunctionExpr::poly_from_roots(catalog_roots(7)));
  if (n == 25) return FunctionExpr::times_exp(FunctionExpr::poly_from_roots(catalog_roots(17)));
  throw std::invalid_argument("unknown function id: " + id);
}

Jet2 eval_jet(const FunctionExpr& fn, Complex z) {
  if (fn.kind() == ExprKind::NewtonQuotient) {
    const Jet3 i = jet3(fn.inner(), z);
    Jet2 j;
    if (!i.valid || std::abs(i.df) < kSingularDenominator) {
      j.valid = false;
      return j;
    }
    // g = f/f'; the derivatives are assembled from the ratios q = f/f',
    // r2 = f''/f', r3 = f'''/f' to avoid overflowing (f')^3.
    const Complex q = i.f / i.df;
    const Complex r2 = i.d2f / i.df;
    const Complex r3 = i.d3f / i.df;
    j.f = q;
    j.df = 1.0 - q * r2;
    j.d2f = -r2 - q * r3 + 2.0 * q * r2 * r2;
    if (too_big(j.f) || too_big(j.df) || too_big(j.d2f)) j.valid = false;
    return j;
  }
  const Jet3 i = jet3(fn, z);
  Jet2 j{i.f, i.df, i.d2f};
  j.valid = i.valid;
  return j;
}

Complex eval_f(const FunctionExpr& fn, Complex z, bool& valid) {
  switch (fn.kind()) {
    case ExprKind::PolyFromRoots:
    case ExprKind::PolyCoeffs: {
      const Complex v = poly_value(fn.coeffs(), z);
      valid = !too_big(v);
      return v;
    }
    case ExprKind::TranscendentalF23: {
      const Complex v = z * z + std::cos(z) + 2.0 * std::sin(z) - kF23Shift;
      valid = !too_big(v);
      return v;
    }
    case ExprKind::TimesExp: {
      bool inner_ok = true;
      const Complex f = eval_f(fn.inner(), z, inner_ok);
      const Complex e = std::exp(z);
      const double mag = std::abs(e);
      const Complex v = f * e;
      valid = inner_ok && mag >= 1e-150 && mag <= kMagnitudeGuard && !too_big(v);
      return v;
    }
    case ExprKind::NewtonQuotient: {
      const Jet2 j = eval_jet(fn, z);
      valid = j.valid;
      return j.f;
    }
  }
  throw std::logic_error("unreachable");
}

ObjectiveJet objective_jet(const FunctionExpr& fn, Complex z) {
  const Jet2 j = eval_jet(fn, z);
  ObjectiveJet out;
  if (!j.valid) {
    out.valid = false;
    return out;
  }
  const Complex grad = std::conj(j.df) * j.f;
  const Complex s = j.d2f * std::conj(j.f);
  const double dfsq = std::norm(j.df);
  out.value = 0.5 * std::norm(j.f);
  out.gradient = {grad.real(), grad.imag()};
  out.hessian = {dfsq + s.real(), -s.imag(), dfsq - s.real()};
  return out;
}

double objective_value(const FunctionExpr& fn, Complex z, bool& valid) {
  const Complex f = eval_f(fn, z, valid);
  return valid ? 0.5 * std::norm(f) : 0.0;
}

std::vector<Complex> distinct_roots(const FunctionExpr& fn) {
  switch (fn.kind()) {
    case ExprKind::PolyFromRoots: {
      std::vector<Complex> out;
      for (const RootSpec& r : fn.roots()) {
        bool seen = false;
        for (const Complex& c : out) seen = seen || c == r.location;
        if (!seen) out.push_back(r.location);
      }
      return out;
    }
    case ExprKind::PolyCoeffs:
      return {};
    case ExprKind::TranscendentalF23: {
      const auto& rr = f23_reference_roots();
      return {rr.begin(), rr.end()};
    }
    case ExprKind::TimesExp:
    case ExprKind::NewtonQuotient:
      // e^z never vanishes, and f/f' vanishes exactly where f does.
      return distinct_roots(fn.inner());
  }
  throw std::logic_error("unreachable");
}

}  // namespace basins
