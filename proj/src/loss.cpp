#include "fdecnl/loss.hpp"

#include <cmath>

#include "fdecnl/grad.hpp"

namespace fdecnl::loss {

namespace {

double slice_to_loss(double slice) {
  if (!(slice > 0.0)) {
    throw std::runtime_error("cnl_value: gamma-slice not strictly positive");
  }
  return -std::log(slice);
}

Vector imag_ratio(const ComplexVector& dG, Complex G) {
  Vector out(dG.size());
  for (Eigen::Index i = 0; i < dG.size(); ++i) out[i] = -dG[i].imag() / G.imag();
  return out;
}

template <typename Params, typename Ctx>
CceEstimate monte_carlo_impl(const SpectrumSample& s, const Params& params, double gamma,
                             long n_draws, std::uint64_t seed, const FixedPointConfig& cfg) {
  if (n_draws < 1) throw std::invalid_argument("ecce_monte_carlo: need n_draws >= 1");
  Rng rng(derive_seed(seed, 2));  // dedicated Monte Carlo stream
  Ctx ctx;
  double sum = 0.0, sumsq = 0.0;
  const int d = static_cast<int>(s.eigenvalues.size());
  for (long n = 0; n < n_draws; ++n) {
    const int j = rng.uniform_int(d);
    const double x = s.eigenvalues[j] + draw_cauchy(gamma, rng);
    const double v = cnl_value(x, params, gamma, cfg, &ctx);
    sum += v;
    sumsq += v * v;
  }
  CceEstimate est;
  est.value = sum / static_cast<double>(n_draws);
  if (n_draws > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * sum / static_cast<double>(n_draws)) / (n_draws - 1.0));
    est.standard_error = std::sqrt(var / static_cast<double>(n_draws));
  }
  return est;
}

template <typename Params, typename Ctx>
CceEstimate quadrature_impl(const std::function<double(double)>& reference_slice,
                            const Params& params, double gamma, const QuadratureConfig& quad,
                            const FixedPointConfig& cfg) {
  if (quad.half_width <= 0.0 || quad.points < 2) {
    throw std::invalid_argument("ecce_quadrature: need L > 0 and n >= 2");
  }
  const double L = quad.half_width;
  const double h = 2.0 * L / (quad.points - 1);
  Ctx ctx;
  double sum = 0.0;
  for (int i = 0; i < quad.points; ++i) {
    const double x = -L + h * i;
    const double ref = reference_slice(x);
    if (ref == 0.0) continue;
    const double w = (i == 0 || i == quad.points - 1) ? 0.5 : 1.0;
    sum += w * ref * cnl_value(x, params, gamma, cfg, &ctx);
  }
  CceEstimate est;
  est.value = h * sum;
  // Tail of the integrand beyond [-L, L]: the reference has Cauchy tails
  // ~ gamma / (pi x^2) and the loss grows like 2 log|x|, so both tails
  // together contribute about (4 gamma / pi) (log L + 1) / L.
  est.standard_error = 4.0 * gamma / M_PI * (std::log(L) + 1.0) / L;
  return est;
}

}  // namespace

double cnl_value(double x, const CwParams& params, double gamma, const FixedPointConfig& cfg,
                 CwContext* ctx) {
  return slice_to_loss(fde::gamma_slice(params, x, gamma, cfg, ctx));
}

double cnl_value(double x, const SpnParams& params, double gamma, const FixedPointConfig& cfg,
                 SpnContext* ctx) {
  return slice_to_loss(fde::gamma_slice(params, x, gamma, cfg, ctx));
}

Vector cnl_grad(double x, const CwParams& params, double gamma, const FixedPointConfig& cfg,
                CwContext* ctx) {
  const auto r = grad::cw_grad(Complex(x, gamma), params, cfg, ctx);
  return imag_ratio(r.dG_dv, r.forward.value);
}

Vector cnl_grad(double x, const SpnParams& params, double gamma, const FixedPointConfig& cfg,
                SpnContext* ctx) {
  const auto r = grad::spn_grad(Complex(x, gamma), params, cfg, ctx);
  return imag_ratio(r.dG, r.forward.value);
}

LossEval cnl_value_grad(double x, const CwParams& params, double gamma,
                        const FixedPointConfig& cfg, CwContext* ctx) {
  const auto r = grad::cw_grad(Complex(x, gamma), params, cfg, ctx);
  LossEval out;
  out.value = slice_to_loss(-r.forward.value.imag() / M_PI);
  out.grad = imag_ratio(r.dG_dv, r.forward.value);
  out.inner_iterations = r.forward.iterations_used;
  out.residual = r.forward.residual;
  return out;
}

LossEval cnl_value_grad(double x, const SpnParams& params, double gamma,
                        const FixedPointConfig& cfg, SpnContext* ctx) {
  const auto r = grad::spn_grad(Complex(x, gamma), params, cfg, ctx);
  LossEval out;
  out.value = slice_to_loss(-r.forward.value.imag() / M_PI);
  out.grad = imag_ratio(r.dG, r.forward.value);
  out.inner_iterations = r.forward.iterations_used;
  out.residual = r.forward.residual;
  return out;
}

CceEstimate ecce_monte_carlo(const SpectrumSample& s, const CwParams& params, double gamma,
                             long n_draws, std::uint64_t seed, const FixedPointConfig& cfg) {
  return monte_carlo_impl<CwParams, CwContext>(s, params, gamma, n_draws, seed, cfg);
}

CceEstimate ecce_monte_carlo(const SpectrumSample& s, const SpnParams& params, double gamma,
                             long n_draws, std::uint64_t seed, const FixedPointConfig& cfg) {
  return monte_carlo_impl<SpnParams, SpnContext>(s, params, gamma, n_draws, seed, cfg);
}

CceEstimate ecce_quadrature(const std::function<double(double)>& reference_slice,
                            const CwParams& params, double gamma, const QuadratureConfig& quad,
                            const FixedPointConfig& cfg) {
  return quadrature_impl<CwParams, CwContext>(reference_slice, params, gamma, quad, cfg);
}

CceEstimate ecce_quadrature(const std::function<double(double)>& reference_slice,
                            const SpnParams& params, double gamma, const QuadratureConfig& quad,
                            const FixedPointConfig& cfg) {
  return quadrature_impl<SpnParams, SpnContext>(reference_slice, params, gamma, quad, cfg);
}

double l1_penalty(const Vector& a, double xi) {
  if (xi < 0.0) throw std::invalid_argument("l1_penalty: need xi >= 0");
  return xi * a.cwiseAbs().sum();
}

Vector l1_subgrad(const Vector& a, double xi) {
  if (xi < 0.0) throw std::invalid_argument("l1_subgrad: need xi >= 0");
  Vector out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out[i] = a[i] > 0.0 ? xi : (a[i] < 0.0 ? -xi : 0.0);
  }
  return out;
}

}  // namespace fdecnl::loss
