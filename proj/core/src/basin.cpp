#include "basins/basin.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

#include "basins/voronoi.hpp"

namespace basins {

namespace {

bool contains_f23(const FunctionExpr& fn) {
  switch (fn.kind()) {
    case ExprKind::TranscendentalF23: return true;
    case ExprKind::TimesExp:
    case ExprKind::NewtonQuotient: return contains_f23(fn.inner());
    default: return false;
  }
}

bool is_iterative(Engine e) {
  switch (e) {
    case Engine::Newton:
    case Engine::Relaxed:
    case Engine::RandomRelaxed:
    case Engine::NewtonOpt:
    case Engine::Nqn:
    case Engine::Bnqn:
    case Engine::BnqnV2: return true;
    default: return false;
  }
}

StepKind step_kind(Engine e) {
  switch (e) {
    case Engine::Newton: return StepKind::Newton;
    case Engine::Relaxed: return StepKind::Relaxed;
    case Engine::RandomRelaxed: return StepKind::RandomRelaxed;
    case Engine::NewtonOpt: return StepKind::NewtonOpt;
    case Engine::Nqn: return StepKind::Nqn;
    case Engine::Bnqn:
    case Engine::BnqnV2: return StepKind::Bnqn;
    default: throw std::logic_error("not an iterative engine");
  }
}

FlowKind flow_kind(Engine e) {
  switch (e) {
    case Engine::FlowPlain: return FlowKind::Plain;
    case Engine::FlowFraction: return FlowKind::Fraction;
    case Engine::FlowOpt: return FlowKind::Optimization;
    default: throw std::logic_error("not a flow engine");
  }
}

}  // namespace

void StochasticSpec::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(relaxed_root_tol > 0.0)) throw std::invalid_argument("relaxed_root_tol must be positive");
  if (relaxed_root_tol < epsilon) {
    throw std::invalid_argument("relaxed_root_tol must be at least epsilon");
  }
}

FunctionExpr stochastic_wrap(const FunctionExpr& fn, const StochasticSpec& spec,
                             RandomStream& noise) {
  if (fn.kind() != ExprKind::PolyFromRoots && fn.kind() != ExprKind::PolyCoeffs) {
    throw std::invalid_argument("stochastic_wrap: function must be a polynomial");
  }
  std::vector<Complex> c = fn.coeffs();
  if (spec.epsilon == 0.0) return FunctionExpr::poly_coeffs(std::move(c));
  const double a = spec.epsilon * noise.normal();
  if (c.size() < 4) c.resize(4, Complex{0.0, 0.0});
  c[0] += -5.0 * a;
  c[1] += 2.0 * a;
  c[3] += a;
  return FunctionExpr::poly_coeffs(std::move(c));
}

std::vector<Complex> classification_targets(const FunctionExpr& fn) {
  std::vector<Complex> roots = distinct_roots(fn);
  if (!contains_f23(fn)) return roots;
  // The transcendental reference roots are quoted to 8 decimals; polish each
  // seed with a few Newton steps before classifying against it.
  for (Complex& r : roots) {
    Complex z = r;
    for (int k = 0; k < 20; ++k) {
      const Jet2 j = eval_jet(fn, z);
      if (!j.valid || std::abs(j.df) < kSingularDenominator) break;
      if (std::abs(j.f) <= 1e-12) break;
      z -= j.f / j.df;
    }
    const Jet2 j = eval_jet(fn, z);
    if (j.valid && std::abs(z - r) < 1e-6) r = z;
  }
  return roots;
}

BasinImage sweep(Engine engine, const FunctionExpr& fn, const SweepConfig& cfg) {
  cfg.grid.validate();
  cfg.method.validate();
  cfg.integrator.validate();
  if (cfg.stochastic) {
    cfg.stochastic->validate();
    if (!is_iterative(engine)) {
      throw std::invalid_argument("stochastic mode supports iterative engines only");
    }
    if (fn.kind() != ExprKind::PolyFromRoots && fn.kind() != ExprKind::PolyCoeffs) {
      throw std::invalid_argument("stochastic mode needs a polynomial function");
    }
  }

  const std::vector<Complex> targets = classification_targets(fn);
  if (targets.empty()) throw std::invalid_argument("sweep: function has no roots to classify");

  MethodConfig method = cfg.method;
  if (engine == Engine::BnqnV2) method.theta = 1.0;
  if (cfg.stochastic) method.root_tol = cfg.stochastic->relaxed_root_tol;

  SiteSet sites;
  if (engine == Engine::Voronoi) sites = reduced_sites(fn);

  BasinImage img(cfg.grid);
  const std::uint64_t seed = cfg.method.seed;

  auto run_pixel = [&](int ix, int iy) {
    const std::size_t i = static_cast<std::size_t>(cfg.grid.pixel_index(ix, iy));
    const Complex z0 = cfg.grid.pixel_center(ix, iy);
    int label = kBlackLabel;
    int iters = 0;
    Complex terminal = z0;
    try {
      if (engine == Engine::Voronoi) {
        label = classify_point(sites, z0);
      } else if (is_iterative(engine)) {
        RandomStream method_stream = RandomStream::for_pixel(
            seed, RandomStream::Domain::Method, static_cast<std::uint64_t>(i));
        RunResult rr;
        if (cfg.stochastic) {
          RandomStream noise = RandomStream::for_pixel(seed, RandomStream::Domain::Noise,
                                                       static_cast<std::uint64_t>(i));
          const StochasticSpec spec = *cfg.stochastic;
          auto fn_at = [&fn, &noise, spec](int) { return stochastic_wrap(fn, spec, noise); };
          rr = run_method_seq(step_kind(engine), fn_at, z0, method, targets, &method_stream);
        } else {
          rr = run_method(step_kind(engine), fn, z0, method, targets, &method_stream);
        }
        if (rr.status == RunStatus::ConvergedToRoot) label = rr.root_index;
        iters = rr.iterations;
        terminal = rr.terminal;
      } else {
        const FlowRunResult fr = integrate_flow(flow_kind(engine), fn, z0, cfg.integrator, targets);
        if (fr.status == RunStatus::ConvergedToRoot) label = fr.root_index;
        iters = fr.steps;
        terminal = fr.terminal;
      }
    } catch (const std::exception&) {
      label = kBlackLabel;  // per-pixel failures darken the pixel, never abort
    }
    img.labels[i] = label;
    img.iterations[i] = iters;
    img.terminal[i] = terminal;
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (int iy = 0; iy < cfg.grid.ny; ++iy) {
      for (int ix = 0; ix < cfg.grid.nx; ++ix) run_pixel(ix, iy);
    }
  } else {
    std::atomic<int> next_row{0};
    auto worker = [&] {
      for (;;) {
        const int iy = next_row.fetch_add(1);
        if (iy >= cfg.grid.ny) return;
        for (int ix = 0; ix < cfg.grid.nx; ++ix) run_pixel(ix, iy);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return img;
}

double compare_images(const BasinImage& a, const BasinImage& b, bool ignore_black) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument("compare_images: dimension mismatch");
  }
  std::int64_t considered = 0;
  std::int64_t differing = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    if (ignore_black && (a.labels[i] == kBlackLabel || b.labels[i] == kBlackLabel)) continue;
    ++considered;
    if (a.labels[i] != b.labels[i]) ++differing;
  }
  return considered == 0 ? 0.0 : static_cast<double>(differing) / static_cast<double>(considered);
}

}  // namespace basins
