#include "fdecnl/optim.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fdecnl/loss.hpp"
#include "fdecnl/rng.hpp"

namespace fdecnl::optim {

namespace {
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kInitStream = 4;
}  // namespace

Vector adam_step(AdamState& state, const Vector& grad, const Vector& theta) {
  if (grad.size() != theta.size()) throw std::invalid_argument("adam_step: dimension mismatch");
  if (state.m.size() != theta.size()) {
    state.m = Vector::Zero(theta.size());
    state.v = Vector::Zero(theta.size());
    state.step = 0;
  }
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double m_corr = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double v_corr = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const Vector m_hat = state.m / m_corr;
  Vector denom = (state.v / v_corr).cwiseSqrt();
  denom.array() += state.eps;
  return theta - state.alpha * m_hat.cwiseQuotient(denom);
}

Vector project_box(const Vector& theta, double M) {
  if (M <= 0.0) throw std::invalid_argument("project_box: need M > 0");
  return theta.cwiseMax(-M).cwiseMin(M);
}

Vector initial_theta(Model model, const SpectrumSample& sample, double M, std::uint64_t seed,
                     SpnInit spn_init) {
  Rng rng(derive_seed(seed, kInitStream));
  if (model == Model::Cw) {
    const double half = 1.0 / std::sqrt(static_cast<double>(sample.p));
    Vector theta(sample.p);
    for (int i = 0; i < sample.p; ++i) theta[i] = rng.uniform(-half, half);
    return theta;
  }
  Vector theta(sample.d + 1);
  for (int k = 0; k < sample.d; ++k) {
    const double lam = sample.eigenvalues[k];
    theta[k] = spn_init == SpnInit::Eigenvalues ? lam : std::sqrt(std::max(0.0, lam));
  }
  theta.head(sample.d) = project_box(theta.head(sample.d), M);
  theta[sample.d] = 0.2;
  return theta;
}

RunResult run_ogd(const SpectrumSample& sample, Model model, const Vector& theta0,
                  const RunConfig& cfg, const ValidationFn& validation) {
  const int d = sample.d;
  if (cfg.n_iterations < 1) throw std::invalid_argument("run_ogd: need N >= 1");
  if (d < 1 || sample.eigenvalues.size() != d) throw std::invalid_argument("run_ogd: bad sample");
  const Eigen::Index want = model == Model::Cw ? sample.p : d + 1;
  if (theta0.size() != want) throw std::invalid_argument("run_ogd: theta0 has wrong length");
  if ((theta0.cwiseAbs().maxCoeff() > cfg.bound)) {
    throw std::invalid_argument("run_ogd: theta0 outside the parameter box");
  }

  const long interval =
      cfg.record_interval > 0 ? cfg.record_interval : std::max<long>(1, cfg.n_iterations / 400);

  Rng rng(derive_seed(cfg.seed, kNoiseStream));
  fde::CwContext cw_ctx;
  fde::SpnContext spn_ctx;
  AdamState adam = cfg.adam;
  adam.m = Vector::Zero(theta0.size());
  adam.v = Vector::Zero(theta0.size());
  adam.step = 0;

  RunResult out;
  out.theta = theta0;
  int consecutive_failures = 0;

  for (long n = 0; n < cfg.n_iterations; ++n) {
    const int j = rng.uniform_int(d);
    const double x = sample.eigenvalues[j] + loss::draw_cauchy(cfg.gamma, rng);

    loss::LossEval eval;
    bool ok = true;
    try {
      if (model == Model::Cw) {
        spectra::CwParams params{out.theta, d, cfg.bound};
        eval = loss::cnl_value_grad(x, params, cfg.gamma, cfg.fixed_point, &cw_ctx);
      } else {
        spectra::SpnParams params{out.theta.head(d), out.theta[d], sample.p, cfg.bound};
        eval = loss::cnl_value_grad(x, params, cfg.gamma, cfg.fixed_point, &spn_ctx);
      }
    } catch (const NonConvergenceError& e) {
      ok = false;
      out.skipped_steps += 1;
      if (++consecutive_failures >= cfg.failure_budget) {
        std::ostringstream msg;
        msg << "run_ogd: " << consecutive_failures
            << " consecutive forward non-convergences (last at iteration " << n << ", x = " << x
            << "): " << e.what();
        throw NonConvergenceError(msg.str(), e.residual, e.iterations);
      }
    }

    if (ok) {
      consecutive_failures = 0;
      Vector g = eval.grad;
      if (cfg.xi > 0.0) {
        if (model == Model::Spn) {
          g.head(d) += loss::l1_subgrad(out.theta.head(d), cfg.xi);
        } else {
          g += loss::l1_subgrad(out.theta, cfg.xi);
        }
      }
      out.theta = project_box(adam_step(adam, g, out.theta), cfg.bound);
      out.total_inner_iterations += eval.inner_iterations;
      out.steps += 1;
    }

    if (n % interval == 0 || n == cfg.n_iterations - 1) {
      TraceRecord rec;
      rec.iteration = n;
      rec.loss_sample = ok ? eval.value : std::numeric_limits<double>::quiet_NaN();
      rec.validation =
          validation ? validation(out.theta) : std::numeric_limits<double>::quiet_NaN();
      rec.inner_iterations = out.total_inner_iterations;
      out.trace.push_back(rec);
    }
  }
  return out;
}

}  // namespace fdecnl::optim
