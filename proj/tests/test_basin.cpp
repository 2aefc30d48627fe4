#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "basins/basin.hpp"
#include "basins/function.hpp"
#include "basins/grid.hpp"
#include "basins/methods.hpp"
#include "basins/rng.hpp"
#include "basins/voronoi.hpp"

using namespace basins;

namespace {

GridSpec small_grid(int n) {
  GridSpec g;
  g.nx = n;
  g.ny = n;
  return g;
}

int count_label(const BasinImage& img, int label) {
  return static_cast<int>(std::count(img.labels.begin(), img.labels.end(), label));
}

double black_fraction(const BasinImage& img) {
  return static_cast<double>(count_label(img, kBlackLabel)) /
         static_cast<double>(img.labels.size());
}

}  // namespace

TEST_CASE("grid geometry") {
  GridSpec g;
  g.x_min = -2.0;
  g.x_max = 2.0;
  g.y_min = 0.0;
  g.y_max = 1.0;
  g.nx = 4;
  g.ny = 2;
  CHECK(g.dx() == 1.0);
  CHECK(g.dy() == 0.5);
  CHECK(g.pixel_center(0, 0) == Complex{-1.5, 0.25});
  CHECK(g.pixel_center(3, 1) == Complex{1.5, 0.75});
  CHECK(g.pixel_index(0, 0) == 0);
  CHECK(g.pixel_index(3, 0) == 3);
  CHECK(g.pixel_index(0, 1) == 4);
  CHECK(g.pixel_count() == 8);

  g.center_jitter = {0.125, -0.0625};
  CHECK(g.pixel_center(0, 0) == Complex{-1.375, 0.1875});

  GridSpec bad = g;
  bad.nx = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.x_max = bad.x_min;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("seed jitter stays within half a pixel pitch and is reproducible") {
  GridSpec g = small_grid(50);
  const GridSpec a = with_seed_jitter(g, 11);
  CHECK(std::abs(a.center_jitter.x) <= 0.5 * g.dx());
  CHECK(std::abs(a.center_jitter.y) <= 0.5 * g.dy());
  const GridSpec b = with_seed_jitter(g, 11);
  CHECK(a.center_jitter.x == b.center_jitter.x);
  CHECK(a.center_jitter.y == b.center_jitter.y);
  const GridSpec c = with_seed_jitter(g, 12);
  CHECK((a.center_jitter.x != c.center_jitter.x || a.center_jitter.y != c.center_jitter.y));
}

TEST_CASE("random stream seeding and draw laws") {
  // splitmix64 finalizer, reference sequence values for seeds 0 and 1.
  CHECK(RandomStream::mix(0) == 0xE220A8397B1DCDAFull);
  CHECK(RandomStream::mix(1) == 0x910A2DEC89025CC1ull);

  // Per-pixel streams depend on seed, domain, and index — and nothing else.
  RandomStream a = RandomStream::for_pixel(7, RandomStream::Domain::Method, 42);
  RandomStream b = RandomStream::for_pixel(7, RandomStream::Domain::Method, 42);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() == b.next_u64());
  RandomStream c = RandomStream::for_pixel(7, RandomStream::Domain::Noise, 42);
  RandomStream d = RandomStream::for_pixel(7, RandomStream::Domain::Jitter, 42);
  RandomStream e = RandomStream::for_pixel(7, RandomStream::Domain::Method, 43);
  RandomStream f = RandomStream::for_pixel(8, RandomStream::Domain::Method, 42);
  const std::uint64_t base = RandomStream::for_pixel(7, RandomStream::Domain::Method, 42).next_u64();
  CHECK(c.next_u64() != base);
  CHECK(d.next_u64() != base);
  CHECK(e.next_u64() != base);
  CHECK(f.next_u64() != base);

  RandomStream u(2024);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));

  RandomStream n(2024);
  double mean = 0.0, m2 = 0.0;
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) {
    const double x = n.normal();
    mean += x;
    m2 += x * x;
  }
  mean /= draws;
  m2 /= draws;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.015));
}

TEST_CASE("stochastic spec validation") {
  CHECK_NOTHROW(StochasticSpec{}.validate());
  StochasticSpec s;
  s.epsilon = -1e-4;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StochasticSpec{};
  s.relaxed_root_tol = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StochasticSpec{};
  s.epsilon = 1e-2;
  s.relaxed_root_tol = 1e-3;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StochasticSpec{};
  s.epsilon = 0.0;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("stochastic_wrap perturbs exactly the cubic pattern") {
  const FunctionExpr f1 = catalog_lookup("f1");
  StochasticSpec spec;
  spec.epsilon = 0.01;
  spec.relaxed_root_tol = 0.1;

  RandomStream noise(555);
  RandomStream ref(555);
  const FunctionExpr g = stochastic_wrap(f1, spec, noise);
  const double a = spec.epsilon * ref.normal();
  REQUIRE(g.kind() == ExprKind::PolyCoeffs);
  const std::vector<Complex>& c0 = f1.coeffs();
  const std::vector<Complex>& c1 = g.coeffs();
  REQUIRE(c1.size() == 4);
  CHECK(c1[0] == c0[0] + Complex{-5.0 * a, 0.0});
  CHECK(c1[1] == c0[1] + Complex{2.0 * a, 0.0});
  CHECK(c1[2] == c0[2]);
  CHECK(c1[3] == c0[3] + Complex{a, 0.0});
  // Streams stay in lockstep: exactly one normal() was consumed.
  CHECK(noise.next_u64() == ref.next_u64());

  // Low-degree polynomials get padded up to the cubic.
  const FunctionExpr line = FunctionExpr::poly_from_roots({{{0.0, 0.0}, 1}});
  RandomStream noise2(555);
  const FunctionExpr gl = stochastic_wrap(line, spec, noise2);
  REQUIRE(gl.coeffs().size() == 4);
  CHECK(gl.coeffs()[0] == Complex{-5.0 * a, 0.0});
  CHECK(gl.coeffs()[1] == Complex{1.0, 0.0} + Complex{2.0 * a, 0.0});
  CHECK(gl.coeffs()[2] == Complex{0.0, 0.0});
  CHECK(gl.coeffs()[3] == Complex{a, 0.0});
}

TEST_CASE("stochastic_wrap with epsilon zero is a bitwise no-op with no draws") {
  const FunctionExpr f1 = catalog_lookup("f1");
  StochasticSpec spec;
  spec.epsilon = 0.0;
  RandomStream noise(99);
  RandomStream ref(99);
  const FunctionExpr g = stochastic_wrap(f1, spec, noise);
  CHECK(g.coeffs() == f1.coeffs());
  CHECK(noise.next_u64() == ref.next_u64());
}

TEST_CASE("stochastic_wrap rejects non-polynomials") {
  StochasticSpec spec;
  RandomStream noise(1);
  CHECK_THROWS_AS(stochastic_wrap(catalog_lookup("f23"), spec, noise), std::invalid_argument);
  CHECK_THROWS_AS(stochastic_wrap(catalog_lookup("f24"), spec, noise), std::invalid_argument);
  CHECK_THROWS_AS(
      stochastic_wrap(FunctionExpr::newton_quotient(catalog_lookup("f1")), spec, noise),
      std::invalid_argument);
}

TEST_CASE("perturbation mean shift matches the quadratic law") {
  // f = z^3 + 2z - 5 is its own perturbation direction, so at z = 0 each draw
  // gives g(0) = -5 (1 + a) with a = eps xi, hence exactly
  //   |g|^2 - |f|^2 = 25 (2a + a^2)  and  G - F = half of that.
  // Centering away the linear term leaves 25 a^2, whose mean estimates
  // 25 eps^2 E[xi^2] with a tiny standard error; the raw mean keeps the
  // zero-mean linear noise, so it only gets a 4-sigma window.
  const FunctionExpr f = FunctionExpr::poly_coeffs(
      {{-5.0, 0.0}, {2.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
  StochasticSpec spec;
  spec.epsilon = 0.1;
  spec.relaxed_root_tol = 0.5;
  RandomStream noise(777);
  const int draws = 200000;
  double mean_sq = 0.0;
  double mean_obj = 0.0;
  double mean_centered = 0.0;
  bool ok = true;
  const double f0_sq = std::norm(eval_f(f, {0.0, 0.0}, ok));
  const double f0_obj = objective_value(f, {0.0, 0.0}, ok);
  for (int k = 0; k < draws; ++k) {
    const FunctionExpr g = stochastic_wrap(f, spec, noise);
    const double a = (g.coeffs()[3] - f.coeffs()[3]).real();  // recovered eps*xi
    const double diff = std::norm(eval_f(g, {0.0, 0.0}, ok)) - f0_sq;
    if (k < 100) CHECK(diff == doctest::Approx(25.0 * (2.0 * a + a * a)).epsilon(1e-12));
    mean_sq += diff;
    mean_obj += objective_value(g, {0.0, 0.0}, ok) - f0_obj;
    mean_centered += diff - 50.0 * a;
  }
  REQUIRE(ok);
  mean_sq /= draws;
  mean_obj /= draws;
  mean_centered /= draws;
  const double law = 25.0 * spec.epsilon * spec.epsilon;
  CHECK(mean_centered == doctest::Approx(law).epsilon(0.03));
  // sd(mean_sq) = 50 eps / sqrt(N) ~ 0.011; stay within 4 sigma of the law.
  CHECK(std::abs(mean_sq - law) <= 0.045);
  // The halved objective shifts by exactly half, draw for draw.
  CHECK(mean_obj == doctest::Approx(0.5 * mean_sq).epsilon(1e-9));
}

TEST_CASE("classification targets") {
  const FunctionExpr f1 = catalog_lookup("f1");
  CHECK(classification_targets(f1) == distinct_roots(f1));

  const FunctionExpr f24 = catalog_lookup("f24");
  CHECK(classification_targets(f24) == distinct_roots(f24));

  const FunctionExpr f23 = catalog_lookup("f23");
  const std::vector<Complex> seeds = distinct_roots(f23);
  const std::vector<Complex> targets = classification_targets(f23);
  REQUIRE(targets.size() == 8);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    CHECK(std::abs(targets[k] - seeds[k]) <= 1e-6);
    bool ok = false;
    CHECK(std::abs(eval_f(f23, targets[k], ok)) <= 1e-10);
    CHECK(ok);
  }
}

TEST_CASE("sweep validates its configuration") {
  const FunctionExpr f1 = catalog_lookup("f1");
  SweepConfig cfg;
  cfg.grid = small_grid(4);

  SweepConfig bad = cfg;
  bad.grid.nx = 0;
  CHECK_THROWS_AS(sweep(Engine::Newton, f1, bad), std::invalid_argument);
  bad = cfg;
  bad.method.rho = 0.5;
  CHECK_THROWS_AS(sweep(Engine::Newton, f1, bad), std::invalid_argument);
  bad = cfg;
  bad.integrator.h = 0.0;
  CHECK_THROWS_AS(sweep(Engine::FlowPlain, f1, bad), std::invalid_argument);

  // No explicit roots -> nothing to classify against.
  const FunctionExpr anon = FunctionExpr::poly_coeffs({{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(sweep(Engine::Newton, anon, cfg), std::invalid_argument);

  // Stochastic mode: iterative engines and polynomials only.
  SweepConfig noisy = cfg;
  noisy.stochastic = StochasticSpec{};
  CHECK_THROWS_AS(sweep(Engine::FlowPlain, f1, noisy), std::invalid_argument);
  CHECK_THROWS_AS(sweep(Engine::Voronoi, f1, noisy), std::invalid_argument);
  CHECK_THROWS_AS(sweep(Engine::Newton, catalog_lookup("f23"), noisy), std::invalid_argument);
  noisy.stochastic->relaxed_root_tol = 0.0;
  CHECK_THROWS_AS(sweep(Engine::Newton, f1, noisy), std::invalid_argument);
}

TEST_CASE("voronoi sweep equals render_voronoi") {
  const FunctionExpr f1 = catalog_lookup("f1");
  SweepConfig cfg;
  cfg.grid = with_seed_jitter(small_grid(24), 3);
  const BasinImage a = sweep(Engine::Voronoi, f1, cfg);
  const BasinImage b = render_voronoi(reduced_sites(f1), cfg.grid);
  CHECK(a.labels == b.labels);
  CHECK(a.iterations == b.iterations);
  CHECK(a.terminal == b.terminal);
}

TEST_CASE("bnqn_v2 engine is bnqn with theta forced to one") {
  const FunctionExpr f3 = catalog_lookup("f3");
  SweepConfig v2;
  v2.grid = small_grid(16);
  v2.method.theta = 0.25;  // ignored by BnqnV2
  SweepConfig manual = v2;
  manual.method.theta = 1.0;
  const BasinImage a = sweep(Engine::BnqnV2, f3, v2);
  const BasinImage b = sweep(Engine::Bnqn, f3, manual);
  CHECK(a.labels == b.labels);
  CHECK(a.iterations == b.iterations);
  CHECK(a.terminal == b.terminal);
}

TEST_CASE("sweep output is independent of thread count and repeatable") {
  const FunctionExpr f1 = catalog_lookup("f1");
  SweepConfig cfg;
  cfg.grid = with_seed_jitter(small_grid(48), 1);
  const BasinImage a = sweep(Engine::Newton, f1, cfg);
  const BasinImage b = sweep(Engine::Newton, f1, cfg);
  SweepConfig mt = cfg;
  mt.threads = 3;
  const BasinImage c = sweep(Engine::Newton, f1, mt);
  CHECK(a.labels == b.labels);
  CHECK(a.iterations == b.iterations);
  CHECK(a.terminal == b.terminal);
  CHECK(a.labels == c.labels);
  CHECK(a.iterations == c.iterations);
  CHECK(a.terminal == c.terminal);

  // The per-pixel stream derivation makes this hold for the random engine too.
  SweepConfig rr = cfg;
  rr.grid = with_seed_jitter(small_grid(24), 1);
  rr.method.seed = 9;
  SweepConfig rr_mt = rr;
  rr_mt.threads = 3;
  const BasinImage d = sweep(Engine::RandomRelaxed, f1, rr);
  const BasinImage e = sweep(Engine::RandomRelaxed, f1, rr_mt);
  CHECK(d.labels == e.labels);
  CHECK(d.iterations == e.iterations);
  CHECK(d.terminal == e.terminal);
}

TEST_CASE("newton sweep labels are covariant under root reordering") {
  const FunctionExpr fa = catalog_lookup("f1");  // roots 0, i, 3+2i
  const FunctionExpr fb = FunctionExpr::poly_from_roots(
      {{{3.0, 2.0}, 1}, {{0.0, 0.0}, 1}, {{0.0, 1.0}, 1}});
  REQUIRE(fa.coeffs() == fb.coeffs());  // same polynomial, different root order
  const int fwd[3] = {1, 2, 0};        // index in fb's list of fa's root k

  SweepConfig cfg;
  cfg.grid = with_seed_jitter(small_grid(24), 2);
  const BasinImage a = sweep(Engine::Newton, fa, cfg);
  const BasinImage b = sweep(Engine::Newton, fb, cfg);
  CHECK(a.iterations == b.iterations);
  CHECK(a.terminal == b.terminal);
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    if (a.labels[i] == kBlackLabel) {
      CHECK(b.labels[i] == kBlackLabel);
    } else {
      CHECK(b.labels[i] == fwd[a.labels[i]]);
    }
  }
}

TEST_CASE("bnqn sweep converges almost everywhere with certified residuals") {
  const FunctionExpr f1 = catalog_lookup("f1");
  const std::vector<Complex> roots = distinct_roots(f1);
  const GridSpec grid = with_seed_jitter(small_grid(60), 0);
  MethodConfig cfg;
  int to_root = 0, to_critical = 0, other = 0;
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const RunResult r = run_method(StepKind::Bnqn, f1, grid.pixel_center(ix, iy), cfg, roots);
      if (r.status == RunStatus::ConvergedToRoot) {
        ++to_root;
        const Jet2 j = eval_jet(f1, r.terminal);
        CHECK(std::abs(j.f) < 1e-3);
        CHECK(std::abs(j.f) * std::abs(j.df) < 1e-4);  // certificate held at the stop
      } else if (r.status == RunStatus::ConvergedToNonRootCritical) {
        ++to_critical;
      } else {
        ++other;
      }
    }
  }
  const double n = static_cast<double>(grid.pixel_count());
  CHECK(to_root / n >= 0.99);
  CHECK(to_critical / n <= 0.01);
  CHECK(other / n <= 0.01);
}

TEST_CASE("plain flow sweep paints almost the whole plane") {
  const FunctionExpr f1 = catalog_lookup("f1");
  SweepConfig cfg;
  cfg.grid = with_seed_jitter(small_grid(48), 0);
  const BasinImage img = sweep(Engine::FlowPlain, f1, cfg);
  CHECK(black_fraction(img) < 0.05);
  for (int k = 0; k < 3; ++k) CHECK(count_label(img, k) > 0);
  // Labeled terminals really sit on the labeled root.
  const std::vector<Complex> roots = distinct_roots(f1);
  for (std::size_t i = 0; i < img.labels.size(); ++i) {
    if (img.labels[i] == kBlackLabel) continue;
    CHECK(std::abs(img.terminal[i] - roots[static_cast<std::size_t>(img.labels[i])]) <= 1.1e-3);
  }
}

TEST_CASE("stochastic newton sweep still finds the basins") {
  const FunctionExpr f1 = catalog_lookup("f1");
  SweepConfig cfg;
  cfg.grid = with_seed_jitter(small_grid(12), 0);
  cfg.stochastic = StochasticSpec{};  // epsilon 1e-4, relaxed tol 1e-3
  const BasinImage img = sweep(Engine::Newton, f1, cfg);
  CHECK(black_fraction(img) <= 0.5);
  for (int label : img.labels) {
    CHECK(label >= kBlackLabel);
    CHECK(label <= 2);
  }
  // And it is reproducible draw-for-draw.
  const BasinImage again = sweep(Engine::Newton, f1, cfg);
  CHECK(img.labels == again.labels);
  CHECK(img.terminal == again.terminal);
}

TEST_CASE("compare_images") {
  GridSpec g = small_grid(2);
  BasinImage a(g), b(g);
  a.labels = {0, kBlackLabel, 1, 1};
  b.labels = {0, 1, 1, 0};
  CHECK(compare_images(a, a, false) == 0.0);
  CHECK(compare_images(a, b, false) == doctest::Approx(0.5));
  // Ignoring black drops pixel 1 from consideration: 1 mismatch out of 3.
  CHECK(compare_images(a, b, true) == doctest::Approx(1.0 / 3.0));

  BasinImage all_black(g);
  CHECK(compare_images(all_black, all_black, true) == 0.0);   // 0/0 counts as agreement
  CHECK(compare_images(all_black, all_black, false) == 0.0);
  CHECK(compare_images(a, all_black, true) == 0.0);
  CHECK(compare_images(a, all_black, false) == doctest::Approx(0.75));

  BasinImage wide(GridSpec{.nx = 4, .ny = 1});
  CHECK_THROWS_AS(compare_images(a, wide, false), std::invalid_argument);
}
