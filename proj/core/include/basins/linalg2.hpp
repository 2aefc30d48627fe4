#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace basins {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// hypot keeps the norm finite even when components are near the overflow edge.
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static Sym2 identity() { return {1.0, 0.0, 1.0}; }
};

inline Sym2 operator+(Sym2 a, Sym2 b) { return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22}; }
inline Sym2 operator*(double s, Sym2 m) { return {s * m.a11, s * m.a12, s * m.a22}; }
inline Vec2 operator*(Sym2 m, Vec2 v) {
  return {m.a11 * v.x + m.a12 * v.y, m.a12 * v.x + m.a22 * v.y};
}

inline double trace(Sym2 m) { return m.a11 + m.a22; }
inline double det(Sym2 m) { return m.a11 * m.a22 - m.a12 * m.a12; }

// Eigen decomposition, lambda1 >= lambda2, {e1, e2} orthonormal with A*ei = lambda_i*ei.
struct Eigen2 {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec2 e1{1.0, 0.0};
  Vec2 e2{0.0, 1.0};
};

inline Eigen2 eigen_sym2(Sym2 m) {
  // Treat a relatively negligible off-diagonal as zero so exactly diagonal
  // input gets exactly axis-aligned eigenvectors.
  if (std::abs(m.a12) <= 1e-30 * (std::abs(m.a11) + std::abs(m.a22))) {
    if (m.a11 >= m.a22) return {m.a11, m.a22, {1.0, 0.0}, {0.0, 1.0}};
    return {m.a22, m.a11, {0.0, 1.0}, {1.0, 0.0}};
  }
  const double mean = 0.5 * (m.a11 + m.a22);
  const double half = 0.5 * (m.a11 - m.a22);
  const double r = std::hypot(half, m.a12);
  // Compute the larger-magnitude eigenvalue by the quadratic formula and the
  // other one from the determinant; this avoids cancellation when the
  // eigenvalues are far apart in magnitude.
  const double big = (mean >= 0.0) ? mean + r : mean - r;
  const double other = (big != 0.0) ? det(m) / big : 0.0;
  Eigen2 out;
  out.lambda1 = std::max(big, other);
  out.lambda2 = std::min(big, other);
  // For a12 != 0, lambda1 exceeds both diagonal entries; pick the
  // better-conditioned of the two eigenvector formulas.
  Vec2 v = (m.a11 >= m.a22) ? Vec2{out.lambda1 - m.a22, m.a12}
                            : Vec2{m.a12, out.lambda1 - m.a11};
  const double n = norm(v);
  out.e1 = {v.x / n, v.y / n};
  out.e2 = {out.e1.y, -out.e1.x};
  return out;
}

// Spectral radius and its smallest-magnitude counterpart.
inline double sp(Sym2 m) {
  const Eigen2 eg = eigen_sym2(m);
  return std::max(std::abs(eg.lambda1), std::abs(eg.lambda2));
}

inline double minsp(Sym2 m) {
  const Eigen2 eg = eigen_sym2(m);
  return std::min(std::abs(eg.lambda1), std::abs(eg.lambda2));
}

// Solves with the eigenvalues replaced by their absolute values: the result is
// sum_i (g . e_i) / |lambda_i| * e_i, i.e. the negative-eigenvalue components
// of the plain solve A^-1 g get their sign flipped. Preserves the solve norm
// and keeps <w, g> positive for invertible A.
inline Vec2 reflect_abs_solve(Sym2 a, Vec2 g) {
  const Eigen2 eg = eigen_sym2(a);
  const double l1 = std::abs(eg.lambda1);
  const double l2 = std::abs(eg.lambda2);
  if (std::min(l1, l2) < 1e-300) {
    throw std::domain_error("reflect_abs_solve: singular matrix");
  }
  const double c1 = dot(g, eg.e1) / l1;
  const double c2 = dot(g, eg.e2) / l2;
  return c1 * eg.e1 + c2 * eg.e2;
}

}  // namespace basins
