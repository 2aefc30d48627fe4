#include "basins/run_config.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "basins/image_io.hpp"

namespace basins {

namespace {

struct EngineEntry {
  const char* name;
  Engine engine;
};

constexpr EngineEntry kEngines[] = {
    {"newton", Engine::Newton},
    {"relaxed", Engine::Relaxed},
    {"random_relaxed", Engine::RandomRelaxed},
    {"newton_opt", Engine::NewtonOpt},
    {"nqn", Engine::Nqn},
    {"bnqn", Engine::Bnqn},
    {"bnqn_v2", Engine::BnqnV2},
    {"flow_plain", Engine::FlowPlain},
    {"flow_fraction", Engine::FlowFraction},
    {"flow_opt", Engine::FlowOpt},
    {"voronoi", Engine::Voronoi},
};

Engine engine_from_name(const std::string& name) {
  for (const EngineEntry& e : kEngines) {
    if (name == e.name) return e.engine;
  }
  throw ConfigError("unknown engine: " + name);
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

std::vector<RootSpec> parse_roots(const std::string& text) {
  std::vector<RootSpec> roots;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const std::vector<double> v = parse_double_list(part, "--roots");
    if (v.size() < 2 || v.size() > 3) {
      throw ConfigError("--roots: each entry is re,im[,mult], got '" + part + "'");
    }
    int mult = 1;
    if (v.size() == 3) {
      mult = static_cast<int>(v[2]);
      if (mult < 1 || static_cast<double>(mult) != v[2]) {
        throw ConfigError("--roots: multiplicity must be a positive integer in '" + part + "'");
      }
    }
    roots.push_back({{v[0], v[1]}, mult});
  }
  if (roots.empty()) throw ConfigError("--roots: no entries");
  return roots;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BASINS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("BASINS_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

}  // namespace

const char* engine_name(Engine e) {
  for (const EngineEntry& entry : kEngines) {
    if (entry.engine == e) return entry.name;
  }
  return "?";
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"basins of attraction for complex root finding"};
  app.name("basins");
  app.set_help_flag("--help", "print usage");  // frees -h for the step-size flag

  std::string function_id, roots_text, transform = "none", engine = "newton";
  std::string bounds_text, delta_text, alpha_text, stepper = "rk4";
  int grid_n = 240;
  bool stochastic = false;
  bool root_tol_given = false, grad_tol_given = false;
  double root_tol = 0.0, grad_tol = 0.0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  MethodConfig& m = cfg.sweep.method;
  IntegratorConfig& integ = cfg.sweep.integrator;

  app.add_option("--function", function_id, "catalog function id (f1..f25)");
  app.add_option("--roots", roots_text, "inline roots: re,im[,mult];re,im[,mult];...");
  app.add_option("--transform", transform, "none | quotient (f/f') | times_exp (f*e^z)");
  app.add_option("--engine", engine,
                 "newton | relaxed | random_relaxed | newton_opt | nqn | bnqn | bnqn_v2 | "
                 "flow_plain | flow_fraction | flow_opt | voronoi");
  app.add_option("--grid-n", grid_n, "pixels per axis (default 240)");
  app.add_option("--bounds", bounds_text, "xmin,xmax,ymin,ymax (default -10,10,-10,10)");
  app.add_option("--max-iter", m.max_iter, "iteration cap (default 10000)");
  app.add_option("--root-tol", root_tol, "root proximity stop (default 1e-6; flows 1e-3)");
  app.add_option("--grad-tol", grad_tol, "gradient stop (default 1e-13 iterative, 1e-8 flows)");
  app.add_option("--delta-set", delta_text, "Hessian shift candidates (default 0,1,-1)");
  app.add_flag("--jitter-deltas", cfg.jitter_deltas, "perturb the delta set from the seed");
  app.add_option("--tau", m.tau, "shift exponent, positive (default 1.5)");
  app.add_option("--gamma0", m.gamma0, "initial line-search step in (0,1] (default 1)");
  double theta = 0.0;
  bool theta_given = false;
  app.add_option("--theta", theta, "step clamping: 0 off, 1 unit clamp");
  app.add_option("--rho", m.rho, "relaxation disk radius in (0.5,1) (default 0.9)");
  app.add_option("--alpha", alpha_text, "relaxed-method factor re[,im] (default 1)");
  double epsilon = 1e-4;
  app.add_option("--epsilon", epsilon, "noise amplitude (default 1e-4)");
  app.add_flag("--stochastic", stochastic, "redraw additive noise each iteration");
  app.add_option("--stepper", stepper, "rk4 | dp54 (default rk4)");
  app.add_option("--h", integ.h, "flow step size (default 0.01)");
  app.add_option("--t-end", integ.t_end, "flow horizon (default 100)");
  app.add_option("--seed", seed, "global seed (default $BASINS_SEED or 0)");
  app.add_option("--threads", cfg.sweep.threads, "worker threads (default 1)");
  app.add_option("--out-ppm", cfg.out_ppm, "write the basin image here");
  app.add_option("--out-csv", cfg.out_csv, "write the per-pixel table here");
  app.add_option("--compare-with", cfg.compare_with, "report mismatch against this PPM");

  std::vector<const char*> argv;
  argv.push_back("basins");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  root_tol_given = app.count("--root-tol") > 0;
  grad_tol_given = app.count("--grad-tol") > 0;
  theta_given = app.count("--theta") > 0;
  seed_given = app.count("--seed") > 0;

  if (!function_id.empty() && !roots_text.empty()) {
    throw ConfigError("--function and --roots are mutually exclusive");
  }
  if (function_id.empty() && roots_text.empty()) {
    throw ConfigError("one of --function or --roots is required");
  }
  cfg.function_id = function_id;
  if (!roots_text.empty()) cfg.inline_roots = parse_roots(roots_text);

  if (transform == "none") cfg.transform = Transform::None;
  else if (transform == "quotient") cfg.transform = Transform::Quotient;
  else if (transform == "times_exp") cfg.transform = Transform::TimesExp;
  else throw ConfigError("unknown transform: " + transform);

  cfg.engine = engine_from_name(engine);

  if (grid_n < 1) throw ConfigError("--grid-n must be >= 1");
  cfg.sweep.grid.nx = grid_n;
  cfg.sweep.grid.ny = grid_n;
  if (!bounds_text.empty()) {
    const std::vector<double> b = parse_double_list(bounds_text, "--bounds");
    if (b.size() != 4) throw ConfigError("--bounds needs xmin,xmax,ymin,ymax");
    cfg.sweep.grid.x_min = b[0];
    cfg.sweep.grid.x_max = b[1];
    cfg.sweep.grid.y_min = b[2];
    cfg.sweep.grid.y_max = b[3];
  }

  if (!delta_text.empty()) m.delta_set = parse_double_list(delta_text, "--delta-set");
  if (!alpha_text.empty()) {
    const std::vector<double> a = parse_double_list(alpha_text, "--alpha");
    if (a.size() > 2) throw ConfigError("--alpha is re[,im]");
    m.relax_alpha = {a[0], a.size() == 2 ? a[1] : 0.0};
  }

  if (theta_given) {
    if (cfg.engine == Engine::BnqnV2 && theta != 1.0) {
      throw ConfigError("bnqn_v2 fixes theta = 1; drop --theta or use --engine bnqn");
    }
    m.theta = theta;
  }
  if (root_tol_given) {
    m.root_tol = root_tol;
    integ.root_tol = root_tol;
  }
  if (grad_tol_given) {
    m.grad_tol = grad_tol;
    integ.grad_tol = grad_tol;
  }

  if (stepper == "rk4") integ.stepper = IntegratorConfig::Stepper::RK4;
  else if (stepper == "dp54") integ.stepper = IntegratorConfig::Stepper::DP54;
  else throw ConfigError("unknown stepper: " + stepper);

  m.seed = seed_given ? seed : default_seed();

  if (stochastic) {
    StochasticSpec spec;
    spec.epsilon = epsilon;
    spec.relaxed_root_tol = std::max(10.0 * epsilon, m.root_tol);
    cfg.sweep.stochastic = spec;
  } else if (app.count("--epsilon") > 0) {
    throw ConfigError("--epsilon only applies together with --stochastic");
  }
  if (cfg.sweep.threads < 1) throw ConfigError("--threads must be >= 1");

  if (cfg.jitter_deltas) {
    // Nudge each shift candidate by up to a tenth of the half-spacing; the
    // perturbed set stays pairwise distinct.
    const double span = 0.1 * m.kappa();
    RandomStream stream = RandomStream::for_pixel(m.seed, RandomStream::Domain::Jitter, 1);
    for (double& d : m.delta_set) d += span * (2.0 * stream.uniform() - 1.0);
  }

  try {
    m.validate();
    integ.validate();
    cfg.sweep.grid.validate();
    if (cfg.sweep.stochastic) cfg.sweep.stochastic->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

FunctionExpr make_function(const RunConfig& cfg) {
  FunctionExpr base = cfg.function_id.empty()
                          ? FunctionExpr::poly_from_roots(cfg.inline_roots)
                          : catalog_lookup(cfg.function_id);
  if (distinct_roots(base).size() > kRootPalette.size()) {
    throw ConfigError("more than 8 distinct roots: palette exhausted");
  }
  switch (cfg.transform) {
    case Transform::None: return base;
    case Transform::Quotient: return FunctionExpr::newton_quotient(std::move(base));
    case Transform::TimesExp: return FunctionExpr::times_exp(std::move(base));
  }
  throw std::logic_error("unreachable");
}

int run_cli(const RunConfig& cfg, std::ostream& log) {
  FunctionExpr fn = [&] {
    try {
      return make_function(cfg);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();

  SweepConfig sweep_cfg = cfg.sweep;
  sweep_cfg.grid = with_seed_jitter(sweep_cfg.grid, sweep_cfg.method.seed);

  const auto t0 = std::chrono::steady_clock::now();
  const BasinImage img = sweep(cfg.engine, fn, sweep_cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::int64_t black = 0;
  for (int label : img.labels) black += (label == kBlackLabel);
  const double total = static_cast<double>(img.grid.pixel_count());

  log << "engine=" << engine_name(cfg.engine)
      << " function=" << (cfg.function_id.empty() ? "inline" : cfg.function_id)
      << " grid=" << img.width() << "x" << img.height() << " seed=" << sweep_cfg.method.seed
      << " converged=" << (1.0 - static_cast<double>(black) / total)
      << " black=" << (static_cast<double>(black) / total) << " elapsed_s=" << elapsed << "\n";

  if (!cfg.out_ppm.empty()) {
    write_ppm(img, cfg.out_ppm);
    log << "wrote " << cfg.out_ppm << "\n";
  }
  if (!cfg.out_csv.empty()) {
    write_csv(img, cfg.out_csv);
    log << "wrote " << cfg.out_csv << "\n";
  }
  if (!cfg.compare_with.empty()) {
    const BasinImage ref = read_ppm_labels(cfg.compare_with);
    log << "mismatch=" << compare_images(img, ref, false)
        << " mismatch_nonblack=" << compare_images(img, ref, true) << "\n";
  }
  return 0;
}

}  // namespace basins
