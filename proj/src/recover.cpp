#include "fdecnl/recover.hpp"

#include <algorithm>
#include <chrono>
#include <memory>

namespace fdecnl::recover {

int baseline_rank(const SpectrumSample& s, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("baseline_rank: need delta > 0");
  int count = 0;
  for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
    if (s.eigenvalues[j] > delta) ++count;
  }
  return count;
}

int rank_from_signal(const Vector& a, double xi0) {
  int count = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (std::abs(a[j]) > xi0) ++count;
  }
  return count;
}

namespace {
Vector sorted(const Vector& x) {
  Vector y = x;
  std::sort(y.data(), y.data() + y.size());
  return y;
}
}  // namespace

double v_cw(const Vector& b, const Vector& b_true) {
  if (b.size() != b_true.size()) throw std::invalid_argument("v_cw: length mismatch");
  return (sorted(b) - sorted(b_true)).norm();
}

double v_spn(const Vector& a, double sigma, const Vector& a_true, double sigma_true) {
  if (a.size() != a_true.size()) throw std::invalid_argument("v_spn: length mismatch");
  return (sorted(a) - sorted(a_true)).norm() + std::abs(sigma - sigma_true);
}

RankResult recover_rank(const SpectrumSample& s, const optim::RunConfig& cfg, double xi0,
                        optim::SpnInit init, const optim::ValidationFn& validation) {
  if (cfg.xi <= 0.0) throw std::invalid_argument("recover_rank: need xi > 0");
  const Vector theta0 = optim::initial_theta(Model::Spn, s, cfg.bound, cfg.seed, init);
  RankResult out;
  out.run = optim::run_ogd(s, Model::Spn, theta0, cfg, validation);
  out.a_hat = out.run.theta.head(s.d);
  out.sigma_hat = out.run.theta[s.d];
  out.threshold = xi0;
  out.estimated_rank = rank_from_signal(out.a_hat, xi0);
  return out;
}

namespace {

// Reference slice of the theta0 model, with its own warm-start context so the
// quadrature sweep reuses solutions along the grid.
std::function<double(double)> model_slice_fn(const Vector& theta0, Model model, double gamma,
                                             int p, int d, const fde::FixedPointConfig& cfg) {
  if (model == Model::Cw) {
    auto ctx = std::make_shared<fde::CwContext>();
    spectra::CwParams params{theta0, d, theta0.cwiseAbs().maxCoeff() + 1.0};
    return [params, gamma, cfg, ctx](double x) {
      return fde::gamma_slice(params, x, gamma, cfg, ctx.get());
    };
  }
  auto ctx = std::make_shared<fde::SpnContext>();
  spectra::SpnParams params{theta0.head(d), theta0[d], p,
                            theta0.cwiseAbs().maxCoeff() + 1.0};
  return [params, gamma, cfg, ctx](double x) {
    return fde::gamma_slice(params, x, gamma, cfg, ctx.get());
  };
}

}  // namespace

GapReport determination_gap(const Vector& theta0, const Vector& theta, Model model, double gamma,
                            int p, int d, std::uint64_t seed, const loss::QuadratureConfig& quad,
                            const fde::FixedPointConfig& cfg) {
  GapReport report;
  report.gamma = gamma;
  report.d = d;

  SpectrumSample sample;
  loss::CceEstimate empirical, deterministic;
  if (model == Model::Cw) {
    spectra::CwParams truth{theta0, d, theta0.cwiseAbs().maxCoeff() + 1.0};
    spectra::CwParams candidate{theta, d, theta.cwiseAbs().maxCoeff() + 1.0};
    sample = spectra::sample_cw(truth, spectra::Field::Real, seed);
    auto empirical_ref = [&sample, gamma](double x) {
      return spectra::poisson_smooth(x, gamma, sample);
    };
    empirical = loss::ecce_quadrature(empirical_ref, candidate, gamma, quad, cfg);
    deterministic = loss::ecce_quadrature(model_slice_fn(theta0, model, gamma, p, d, cfg),
                                          candidate, gamma, quad, cfg);
  } else {
    spectra::SpnParams truth{theta0.head(d), theta0[d], p, theta0.cwiseAbs().maxCoeff() + 1.0};
    spectra::SpnParams candidate{theta.head(d), theta[d], p, theta.cwiseAbs().maxCoeff() + 1.0};
    sample = spectra::sample_spn(truth, spectra::Field::Real, seed);
    auto empirical_ref = [&sample, gamma](double x) {
      return spectra::poisson_smooth(x, gamma, sample);
    };
    empirical = loss::ecce_quadrature(empirical_ref, candidate, gamma, quad, cfg);
    deterministic = loss::ecce_quadrature(model_slice_fn(theta0, model, gamma, p, d, cfg),
                                          candidate, gamma, quad, cfg);
  }
  report.empirical_entropy = empirical.value;
  report.deterministic_entropy = deterministic.value;
  report.gap = empirical.value - deterministic.value;
  report.quadrature_bound = empirical.standard_error + deterministic.standard_error;
  return report;
}

SweepCell run_recovery_cell(int p, int d, int d_true, double lambda_min, double sigma_true,
                            double delta, const optim::RunConfig& base_cfg, double xi0,
                            std::uint64_t seed, optim::SpnInit init) {
  const auto t0 = std::chrono::steady_clock::now();
  auto [truth, sample] = spectra::sample_true_spn_experiment(p, d, d_true, lambda_min, sigma_true,
                                                             seed);
  optim::RunConfig cfg = base_cfg;
  cfg.seed = seed;
  const RankResult result = recover_rank(sample, cfg, xi0, init);

  SweepCell cell;
  cell.d_true = d_true;
  cell.lambda_min = lambda_min;
  cell.seed = seed;
  cell.estimated_rank = result.estimated_rank;
  cell.baseline = baseline_rank(sample, delta);
  cell.validation = v_spn(result.a_hat, result.sigma_hat, truth.a, truth.sigma);
  cell.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

}  // namespace fdecnl::recover
