// fdecnl command-line driver: sampling, estimation, rank recovery, density
// evaluation, and determination-gap experiments from JSON configs.
//
// Exit codes: 0 success, 2 config error, 3 numerical non-convergence, 4 I/O.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdecnl/io.hpp"
#include "fdecnl/loss.hpp"
#include "fdecnl/optim.hpp"
#include "fdecnl/recover.hpp"
#include "fdecnl/rng.hpp"

using namespace fdecnl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string output_dir = ".";
  int jobs = 1;
  long seed_override = -1;
};

// ---------------------------------------------------------------------------
// Config access with field-level diagnostics.

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::IoError("cannot open config: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
  return cfg;
}

void check_fields(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown field '" + item.key() + "' in " + where);
    }
  }
}

double get_number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("field '" + key + "' must be a number");
  return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& key, long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ConfigError("field '" + key + "' must be an integer");
  return obj[key].get<long>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError("field '" + key + "' must be a string");
  return obj[key].get<std::string>();
}

Vector get_vector(const json& arr, const std::string& key) {
  if (!arr.is_array()) throw ConfigError("field '" + key + "' must be an array of numbers");
  Vector v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ConfigError("field '" + key + "' must be an array of numbers");
    v[i] = arr[i].get<double>();
  }
  return v;
}

Model get_model(const json& cfg) {
  const std::string name = get_string(cfg, "model", "");
  if (name == "cw") return Model::Cw;
  if (name == "spn") return Model::Spn;
  throw ConfigError("field 'model' must be \"cw\" or \"spn\"");
}

std::vector<std::uint64_t> get_seeds(const json& cfg, const Options& opt) {
  if (opt.seed_override >= 0) return {static_cast<std::uint64_t>(opt.seed_override)};
  if (!cfg.contains("seeds")) return {0};
  if (!cfg["seeds"].is_array()) throw ConfigError("field 'seeds' must be an array of integers");
  std::vector<std::uint64_t> seeds;
  for (const auto& s : cfg["seeds"]) {
    if (!s.is_number_integer()) throw ConfigError("field 'seeds' must be an array of integers");
    seeds.push_back(s.get<std::uint64_t>());
  }
  if (seeds.empty()) throw ConfigError("field 'seeds' must not be empty");
  return seeds;
}

fde::FixedPointConfig get_fixed_point(const json& cfg) {
  fde::FixedPointConfig fp;
  if (!cfg.contains("fixed_point")) return fp;
  const json& obj = cfg["fixed_point"];
  check_fields(obj, "fixed_point", {"tolerance", "max_iterations", "damping"});
  fp.tolerance = get_number(obj, "tolerance", fp.tolerance);
  fp.max_iterations = get_integer(obj, "max_iterations", fp.max_iterations);
  if (obj.contains("damping")) {
    if (!obj["damping"].is_boolean()) throw ConfigError("field 'damping' must be a boolean");
    fp.damping = obj["damping"].get<bool>();
  }
  if (fp.tolerance <= 0 || fp.max_iterations < 1) {
    throw ConfigError("fixed_point requires tolerance > 0 and max_iterations >= 1");
  }
  return fp;
}

optim::AdamState get_adam(const json& cfg) {
  optim::AdamState adam;
  if (!cfg.contains("adam")) return adam;
  const json& obj = cfg["adam"];
  check_fields(obj, "adam", {"alpha", "beta1", "beta2", "eps"});
  adam.alpha = get_number(obj, "alpha", adam.alpha);
  adam.beta1 = get_number(obj, "beta1", adam.beta1);
  adam.beta2 = get_number(obj, "beta2", adam.beta2);
  adam.eps = get_number(obj, "eps", adam.eps);
  return adam;
}

loss::QuadratureConfig get_quadrature(const json& cfg) {
  loss::QuadratureConfig quad;
  if (!cfg.contains("quadrature")) return quad;
  const json& obj = cfg["quadrature"];
  check_fields(obj, "quadrature", {"half_width", "points"});
  quad.half_width = get_number(obj, "half_width", quad.half_width);
  quad.points = static_cast<int>(get_integer(obj, "points", quad.points));
  return quad;
}

// Ground-truth parameter specification: explicit arrays, a uniform law, or
// the sparse signal layout of the recovery experiments.
Vector draw_truth_cw(const json& truth, int p, std::uint64_t seed) {
  check_fields(truth, "truth", {"v", "uniform"});
  if (truth.contains("v")) {
    Vector v = get_vector(truth["v"], "truth.v");
    if (v.size() != p) throw ConfigError("field 'truth.v' must have length p");
    return v;
  }
  if (truth.contains("uniform")) {
    const json& u = truth["uniform"];
    check_fields(u, "truth.uniform", {"low", "high"});
    Rng rng(derive_seed(seed, 5));
    Vector v(p);
    const double lo = get_number(u, "low", -0.1), hi = get_number(u, "high", 0.1);
    for (int i = 0; i < p; ++i) v[i] = rng.uniform(lo, hi);
    return v;
  }
  throw ConfigError("truth for the cw model needs field 'v' or 'uniform'");
}

spectra::SpnParams draw_truth_spn(const json& truth, int p, int d, double bound,
                                  std::uint64_t seed) {
  check_fields(truth, "truth", {"a", "sigma", "uniform", "sparse"});
  spectra::SpnParams params;
  params.p = p;
  params.bound = bound;
  params.sigma = get_number(truth, "sigma", 0.1);
  if (truth.contains("a")) {
    params.a = get_vector(truth["a"], "truth.a");
    if (params.a.size() != d) throw ConfigError("field 'truth.a' must have length d");
    return params;
  }
  if (truth.contains("uniform")) {
    const json& u = truth["uniform"];
    check_fields(u, "truth.uniform", {"low", "high"});
    Rng rng(derive_seed(seed, 5));
    params.a = Vector(d);
    const double lo = get_number(u, "low", 0.0), hi = get_number(u, "high", 1.0);
    for (int i = 0; i < d; ++i) params.a[i] = rng.uniform(lo, hi);
    return params;
  }
  if (truth.contains("sparse")) {
    const json& sp = truth["sparse"];
    check_fields(sp, "truth.sparse", {"d_true", "lambda_min"});
    const int d_true = static_cast<int>(get_integer(sp, "d_true", 0));
    const double lambda_min = get_number(sp, "lambda_min", 0.3);
    if (d_true < 0 || d_true > d) throw ConfigError("field 'truth.sparse.d_true' out of range");
    Rng rng(derive_seed(seed, 0));
    params.a = Vector::Zero(d);
    for (int k = d - d_true; k < d; ++k) params.a[k] = rng.uniform(lambda_min, 1.0);
    return params;
  }
  throw ConfigError("truth for the spn model needs field 'a', 'uniform', or 'sparse'");
}

// Run fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, n);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

io::Preamble make_preamble(const json& effective_config) {
  return {std::string("fdecnl ") + io::kVersion, "config " + effective_config.dump()};
}

std::string out_path(const Options& opt, const std::string& name) {
  fs::create_directories(opt.output_dir);
  return (fs::path(opt.output_dir) / name).string();
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_sample(const json& cfg, const Options& opt) {
  check_fields(cfg, "sample config", {"model", "p", "d", "seeds", "truth", "field"});
  const Model model = get_model(cfg);
  const int p = static_cast<int>(get_integer(cfg, "p", 0));
  const int d = static_cast<int>(get_integer(cfg, "d", 0));
  if (p < 1 || d < 1) throw ConfigError("fields 'p' and 'd' must be positive integers");
  if (!cfg.contains("truth")) throw ConfigError("sample config needs field 'truth'");
  const std::string field_name = get_string(cfg, "field", "real");
  if (field_name != "real" && field_name != "complex") {
    throw ConfigError("field 'field' must be \"real\" or \"complex\"");
  }
  const auto field = field_name == "real" ? spectra::Field::Real : spectra::Field::Complex;
  const auto seeds = get_seeds(cfg, opt);

  json effective = cfg;
  effective["field"] = field_name;

  std::vector<spectra::SpectrumSample> samples(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), opt.jobs, [&](int i) {
    if (model == Model::Cw) {
      spectra::CwParams truth{draw_truth_cw(cfg["truth"], p, seeds[i]), d, 1e9};
      samples[i] = spectra::sample_cw(truth, field, derive_seed(seeds[i], 1));
    } else {
      const auto truth = draw_truth_spn(cfg["truth"], p, d, 1e9, seeds[i]);
      samples[i] = spectra::sample_spn(truth, field, derive_seed(seeds[i], 1));
    }
  });
  for (size_t i = 0; i < seeds.size(); ++i) {
    const std::string path = out_path(
        opt, "sample_" + std::string(model_name(model)) + "_seed" + std::to_string(seeds[i]) +
                 ".csv");
    io::write_sample_csv(path, samples[i], model_name(model), seeds[i],
                         make_preamble(effective));
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

struct EstimateResult {
  Vector theta;
  optim::RunTrace trace;
};

int cmd_estimate(const json& cfg, const Options& opt) {
  check_fields(cfg, "estimate config",
               {"model", "p", "d", "seeds", "truth", "sample_csv", "gamma", "N", "M", "xi",
                "record_interval", "spn_init", "fixed_point", "adam"});
  const Model model = get_model(cfg);
  const auto seeds = get_seeds(cfg, opt);

  const std::string init_name = get_string(cfg, "spn_init", "eigenvalues");
  if (init_name != "eigenvalues" && init_name != "sqrt-eigenvalues") {
    throw ConfigError("field 'spn_init' must be \"eigenvalues\" or \"sqrt-eigenvalues\"");
  }
  const auto spn_init = init_name == "eigenvalues" ? optim::SpnInit::Eigenvalues
                                                   : optim::SpnInit::SqrtEigenvalues;

  optim::RunConfig run;
  run.gamma = get_number(cfg, "gamma", 0.1);
  run.bound = get_number(cfg, "M", model == Model::Cw ? 1.0 : 1.2);
  run.xi = get_number(cfg, "xi", 0.0);
  run.record_interval = get_integer(cfg, "record_interval", 0);
  run.fixed_point = get_fixed_point(cfg);
  run.adam = get_adam(cfg);

  const bool from_file = cfg.contains("sample_csv");
  const int p = static_cast<int>(get_integer(cfg, "p", 0));
  const int d = static_cast<int>(get_integer(cfg, "d", 0));
  if (!from_file && (p < 1 || d < 1)) {
    throw ConfigError("estimate needs 'sample_csv' or positive 'p' and 'd' with 'truth'");
  }
  if (!from_file && !cfg.contains("truth")) {
    throw ConfigError("estimate without 'sample_csv' needs field 'truth'");
  }

  json effective = cfg;
  effective["gamma"] = run.gamma;
  effective["M"] = run.bound;
  effective["xi"] = run.xi;
  effective["spn_init"] = init_name;

  std::vector<EstimateResult> results(seeds.size());
  std::vector<std::string> errors(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), opt.jobs, [&](int i) {
    try {
      spectra::SpectrumSample sample;
      optim::ValidationFn validation;
      if (from_file) {
        sample = io::read_sample_csv(get_string(cfg, "sample_csv", "")).sample;
      } else if (model == Model::Cw) {
        spectra::CwParams truth{draw_truth_cw(cfg["truth"], p, seeds[i]), d, 1e9};
        sample = spectra::sample_cw(truth, spectra::Field::Real, derive_seed(seeds[i], 1));
        const Vector v_true = truth.v;
        validation = [v_true](const Vector& th) { return recover::v_cw(th, v_true); };
      } else {
        const auto truth = draw_truth_spn(cfg["truth"], p, d, 1e9, seeds[i]);
        sample = spectra::sample_spn(truth, spectra::Field::Real, derive_seed(seeds[i], 1));
        const Vector a_true = truth.a;
        const double sigma_true = truth.sigma;
        validation = [a_true, sigma_true, d](const Vector& th) {
          return recover::v_spn(th.head(d), th[d], a_true, sigma_true);
        };
      }
      optim::RunConfig cell = run;
      cell.seed = seeds[i];
      cell.n_iterations = get_integer(cfg, "N", 400L * sample.d);
      const Vector theta0 = optim::initial_theta(model, sample, cell.bound, seeds[i], spn_init);
      auto res = optim::run_ogd(sample, model, theta0, cell, validation);
      results[i] = {res.theta, res.trace};
    } catch (const NonConvergenceError& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& err : errors) {
    if (!err.empty()) {
      std::fprintf(stderr, "error: %s\n", err.c_str());
      return 3;
    }
  }
  for (size_t i = 0; i < seeds.size(); ++i) {
    const std::string stem =
        "estimate_" + std::string(model_name(model)) + "_seed" + std::to_string(seeds[i]);
    io::write_trace_csv(out_path(opt, stem + "_trace.csv"), results[i].trace,
                        make_preamble(effective));
    io::write_theta_json(out_path(opt, stem + "_theta.json"), model, results[i].theta,
                         effective.dump());
    std::printf("wrote %s_{trace.csv,theta.json}\n", out_path(opt, stem).c_str());
  }
  return 0;
}

int cmd_recover(const json& cfg, const Options& opt) {
  check_fields(cfg, "recover config",
               {"p", "d", "seeds", "d_true", "lambda_min", "sigma_true", "delta", "gamma", "N",
                "M", "xi", "xi0", "spn_init", "record_interval", "fixed_point", "adam"});
  const int p = static_cast<int>(get_integer(cfg, "p", 50));
  const int d = static_cast<int>(get_integer(cfg, "d", 50));
  const double sigma_true = get_number(cfg, "sigma_true", 0.1);
  const double delta = get_number(cfg, "delta", 0.1);
  const double xi0 = get_number(cfg, "xi0", 1e-3);
  const auto seeds = get_seeds(cfg, opt);

  std::vector<int> d_true_list = {10};
  if (cfg.contains("d_true")) {
    if (!cfg["d_true"].is_array()) throw ConfigError("field 'd_true' must be an array");
    d_true_list.clear();
    for (const auto& v : cfg["d_true"]) {
      if (!v.is_number_integer()) throw ConfigError("field 'd_true' must hold integers");
      d_true_list.push_back(v.get<int>());
    }
  }
  std::vector<double> lambda_list = {0.3};
  if (cfg.contains("lambda_min")) {
    if (!cfg["lambda_min"].is_array()) throw ConfigError("field 'lambda_min' must be an array");
    lambda_list.clear();
    for (const auto& v : cfg["lambda_min"]) {
      if (!v.is_number()) throw ConfigError("field 'lambda_min' must hold numbers");
      lambda_list.push_back(v.get<double>());
    }
  }

  optim::RunConfig run;
  run.gamma = get_number(cfg, "gamma", 0.1);
  run.bound = get_number(cfg, "M", 1.2);
  run.xi = get_number(cfg, "xi", 1e-3);
  run.n_iterations = get_integer(cfg, "N", 400L * d);
  run.record_interval = get_integer(cfg, "record_interval", 0);
  run.fixed_point = get_fixed_point(cfg);
  run.adam = get_adam(cfg);
  if (run.xi <= 0.0) throw ConfigError("field 'xi' must be positive for recover");

  json effective = cfg;
  effective["gamma"] = run.gamma;
  effective["xi"] = run.xi;
  effective["xi0"] = xi0;
  effective["N"] = run.n_iterations;

  struct Cell {
    int d_true;
    double lambda_min;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int dt : d_true_list)
    for (double lm : lambda_list)
      for (auto s : seeds) cells.push_back({dt, lm, s});

  std::vector<recover::SweepCell> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  parallel_for(static_cast<int>(cells.size()), opt.jobs, [&](int i) {
    try {
      rows[i] = recover::run_recovery_cell(p, d, cells[i].d_true, cells[i].lambda_min,
                                           sigma_true, delta, run, xi0, cells[i].seed);
    } catch (const NonConvergenceError& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& err : errors) {
    if (!err.empty()) {
      std::fprintf(stderr, "error: %s\n", err.c_str());
      return 3;
    }
  }
  const std::string path = out_path(opt, "recover_sweep.csv");
  io::write_sweep_csv(path, rows, make_preamble(effective));
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_density(const json& cfg, const Options& opt) {
  check_fields(cfg, "density config",
               {"model", "p", "d", "theta", "gamma", "grid", "sample_csv", "fixed_point"});
  const Model model = get_model(cfg);
  const double gamma = get_number(cfg, "gamma", 0.1);
  const auto fp = get_fixed_point(cfg);
  if (!cfg.contains("theta")) throw ConfigError("density config needs field 'theta'");
  const json& theta = cfg["theta"];

  double lo = -1.0, hi = 5.0;
  int n = 101;
  if (cfg.contains("grid")) {
    const json& grid = cfg["grid"];
    check_fields(grid, "grid", {"low", "high", "points"});
    lo = get_number(grid, "low", lo);
    hi = get_number(grid, "high", hi);
    n = static_cast<int>(get_integer(grid, "points", n));
    if (n < 2 || hi <= lo) throw ConfigError("grid requires points >= 2 and high > low");
  }

  std::optional<spectra::SpectrumSample> overlay;
  if (cfg.contains("sample_csv")) {
    overlay = io::read_sample_csv(get_string(cfg, "sample_csv", "")).sample;
  }

  std::vector<io::DensityRow> rows(n);
  const double h = (hi - lo) / (n - 1);
  if (model == Model::Cw) {
    check_fields(theta, "theta", {"v"});
    const int d = static_cast<int>(get_integer(cfg, "d", 0));
    Vector v = get_vector(theta.at("v"), "theta.v");
    spectra::CwParams params{v, d >= 1 ? d : static_cast<int>(v.size()),
                             v.cwiseAbs().maxCoeff() + 1.0};
    fde::CwContext ctx;
    for (int i = 0; i < n; ++i) {
      const double x = lo + h * i;
      const auto r = fde::cw_cauchy(Complex(x, gamma), params, fp, &ctx);
      rows[i] = {x, -r.value.imag() / M_PI, r.iterations_used, r.residual,
                 overlay ? spectra::poisson_smooth(x, gamma, *overlay) : -1.0};
    }
  } else {
    check_fields(theta, "theta", {"a", "sigma"});
    const int p = static_cast<int>(get_integer(cfg, "p", 0));
    spectra::SpnParams params;
    params.a = get_vector(theta.at("a"), "theta.a");
    params.sigma = get_number(theta, "sigma", 0.1);
    params.p = p >= 1 ? p : params.d();
    params.bound = std::max(params.a.cwiseAbs().maxCoeff(), std::abs(params.sigma)) + 1.0;
    fde::SpnContext ctx;
    for (int i = 0; i < n; ++i) {
      const double x = lo + h * i;
      const auto r = fde::spn_cauchy(Complex(x, gamma), params, fp, &ctx);
      rows[i] = {x, -r.value.imag() / M_PI, r.iterations_used, r.residual,
                 overlay ? spectra::poisson_smooth(x, gamma, *overlay) : -1.0};
    }
  }

  json effective = cfg;
  effective["gamma"] = gamma;
  const std::string path = out_path(opt, "density_" + std::string(model_name(model)) + ".csv");
  io::write_density_csv(path, rows, overlay.has_value(), make_preamble(effective));
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_gap(const json& cfg, const Options& opt) {
  check_fields(cfg, "gap config",
               {"model", "p", "d", "seeds", "gamma", "theta0", "theta", "quadrature",
                "fixed_point"});
  const Model model = get_model(cfg);
  const double gamma = get_number(cfg, "gamma", 0.1);
  const auto fp = get_fixed_point(cfg);
  const auto quad = get_quadrature(cfg);
  const auto seeds = get_seeds(cfg, opt);
  if (!cfg.contains("theta0") || !cfg.contains("theta")) {
    throw ConfigError("gap config needs fields 'theta0' and 'theta'");
  }

  std::vector<int> d_list;
  if (cfg.contains("d") && cfg["d"].is_array()) {
    for (const auto& v : cfg["d"]) {
      if (!v.is_number_integer()) throw ConfigError("field 'd' must hold integers");
      d_list.push_back(v.get<int>());
    }
  } else {
    d_list.push_back(static_cast<int>(get_integer(cfg, "d", 50)));
  }

  struct Job {
    int d;
    std::uint64_t seed;
  };
  std::vector<Job> jobs_list;
  for (int d : d_list)
    for (auto s : seeds) jobs_list.push_back({d, s});

  std::vector<recover::GapReport> reports(jobs_list.size());
  parallel_for(static_cast<int>(jobs_list.size()), opt.jobs, [&](int i) {
    const int d = jobs_list[i].d;
    const std::uint64_t seed = jobs_list[i].seed;
    const int p = cfg.contains("p") ? static_cast<int>(get_integer(cfg, "p", d)) : d;
    Vector th0, th;
    if (model == Model::Cw) {
      th0 = draw_truth_cw(cfg["theta0"], p, seed);
      th = draw_truth_cw(cfg["theta"], p, derive_seed(seed, 6));
    } else {
      const auto t0 = draw_truth_spn(cfg["theta0"], p, d, 1e9, seed);
      const auto t1 = draw_truth_spn(cfg["theta"], p, d, 1e9, derive_seed(seed, 6));
      th0 = Vector(d + 1);
      th0 << t0.a, t0.sigma;
      th = Vector(d + 1);
      th << t1.a, t1.sigma;
    }
    reports[i] =
        recover::determination_gap(th0, th, model, gamma, p, d, derive_seed(seed, 1), quad, fp);
  });

  json effective = cfg;
  effective["gamma"] = gamma;
  const std::string path = out_path(opt, "gap_" + std::string(model_name(model)) + ".csv");
  io::write_gap_csv(path, reports, make_preamble(effective));
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral estimation of random matrix models via free deterministic "
               "equivalents and the Cauchy noise loss"};
  app.set_version_flag("--version", std::string("fdecnl ") + io::kVersion);
  app.require_subcommand(1);

  Options opt;
  app.add_option("--output-dir", opt.output_dir, "Directory for output files")
      ->envname("FDECNL_OUTPUT_DIR");
  app.add_option("--jobs", opt.jobs, "Seed-level parallelism")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed_override, "Override the config's seed list with one seed");

  std::string config_path;
  int (*handler)(const json&, const Options&) = nullptr;

  auto* sample = app.add_subcommand("sample", "Generate sample spectra and write them as CSV");
  auto* estimate = app.add_subcommand("estimate", "Run the online gradient descent estimator");
  auto* recover_cmd = app.add_subcommand("recover", "Dimensionality-recovery sweep");
  auto* density = app.add_subcommand("density", "Evaluate a model's gamma-slice on a grid");
  auto* gap = app.add_subcommand("gap", "Measure the determination gap");
  for (auto* sub : {sample, estimate, recover_cmd, density, gap}) {
    sub->add_option("--config", config_path, "JSON config file")->required();
  }
  sample->callback([&] { handler = &cmd_sample; });
  estimate->callback([&] { handler = &cmd_estimate; });
  recover_cmd->callback([&] { handler = &cmd_recover; });
  density->callback([&] { handler = &cmd_density; });
  gap->callback([&] { handler = &cmd_gap; });

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(config_path);
    return handler(cfg, opt);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const io::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const NonConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
}
