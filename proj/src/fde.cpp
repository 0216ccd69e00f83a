#include "fdecnl/fde.hpp"

#include <sstream>

namespace fdecnl::fde {

namespace {

[[noreturn]] void throw_nonconvergence(const char* where, double residual, long iterations) {
  std::ostringstream msg;
  msg << where << ": fixed point did not converge within " << iterations
      << " iterations (last residual " << residual << ")";
  throw NonConvergenceError(msg.str(), residual, iterations);
}

double norm2(Complex x) { return std::abs(x); }

// Generic fixed-point driver. Stops when the undamped residual |f(x) - x|
// drops to the tolerance; this implies the successive-difference rule for
// both the plain and the averaged iteration. Returns the mapped value f(x),
// whose own residual is at most the reported one (f contracts near the
// solution).
template <typename V, typename F>
TransformResult<V> solve_fixed_point(const char* where, F&& f, V x, const FixedPointConfig& cfg) {
  double residual = 0.0;
  for (long n = 1; n <= cfg.max_iterations; ++n) {
    const V y = f(x);
    residual = norm2(y - x);
    if (residual <= cfg.tolerance) return {y, n, residual};
    x = cfg.damping ? 0.5 * (x + y) : y;
  }
  throw_nonconvergence(where, residual, cfg.max_iterations);
}

}  // namespace

Complex cw_r(Complex b, const Vector& v, int d) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) acc += v[i] / (1.0 - v[i] * b);
  }
  return acc / static_cast<double>(d);
}

TransformResult<Complex> cw_cauchy(Complex z, const CwParams& params, const FixedPointConfig& cfg,
                                   CwContext* ctx) {
  if (z.imag() <= 0.0) throw std::invalid_argument("cw_cauchy: need Im z > 0");
  Complex b0(0.0, -1.0);
  if (ctx && ctx->warm) b0 = *ctx->warm;
  auto step = [&](Complex b) { return 1.0 / (z - cw_r(b, params.v, params.d)); };
  TransformResult<Complex> res = solve_fixed_point<Complex>("cw_cauchy", step, b0, cfg);
  if (ctx) ctx->warm = res.value;
  return res;
}

TransformResult<D2Point> spn_g_sigma(const D2Point& Z, double sigma, int p, int d,
                                     const FixedPointConfig& cfg, std::optional<D2Point> warm) {
  if (!in_upper_half(Z)) throw std::invalid_argument("spn_g_sigma: need Z in H+(C^2)");
  if (sigma == 0.0) return {entrywise_inverse(Z), 0, 0.0};
  const double s2 = sigma * sigma;
  D2Point b0{Complex(0.0, -1.0), Complex(0.0, -1.0)};
  if (warm) b0 = *warm;
  auto step = [&](const D2Point& b) { return entrywise_inverse(Z - s2 * eta2(b, p, d)); };
  return solve_fixed_point<D2Point>("spn_g_sigma", step, b0, cfg);
}

D2Point spn_g_a(const D2Point& B, const Vector& a, int p, int d) {
  const Complex q = B.b2 * B.b1;
  Complex sum(0.0, 0.0);
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const Complex den = q - a[k] * a[k];
    if (std::abs(den) <= 1e-30) {
      throw SingularDenominatorError("spn_g_a: b2*b1 - a_k^2 vanishes");
    }
    sum += 1.0 / den;
  }
  const double pd = static_cast<double>(p);
  return {B.b2 * sum / static_cast<double>(d),
          B.b1 * sum / pd + static_cast<double>(p - d) / (pd * B.b2)};
}

D2Point h_a(const D2Point& B, const Vector& a, int p, int d) {
  return entrywise_inverse(spn_g_a(B, a, p, d)) - B;
}

TransformResult<D2Point> h_sigma(const D2Point& B, double sigma, int p, int d,
                                 const FixedPointConfig& cfg, std::optional<D2Point> warm) {
  TransformResult<D2Point> g = spn_g_sigma(B, sigma, p, d, cfg, warm);
  return {entrywise_inverse(g.value) - B, g.iterations_used, g.residual};
}

TransformResult<D2Point> spn_subordination(const D2Point& Z, const Vector& a, double sigma, int p,
                                           int d, const FixedPointConfig& cfg, SpnContext* ctx,
                                           long* inner_g_iterations) {
  if (!in_upper_half(Z)) throw std::invalid_argument("spn_subordination: need Z in H+(C^2)");
  D2Point psi0{Complex(0.0, 1.0), Complex(0.0, 1.0)};
  if (ctx && ctx->warm_psi) psi0 = *ctx->warm_psi;
  std::optional<D2Point> warm_g = ctx ? ctx->warm_g : std::nullopt;
  long inner = 0;
  auto step = [&](const D2Point& b) {
    TransformResult<D2Point> hs = h_sigma(b, sigma, p, d, cfg, warm_g);
    inner += hs.iterations_used;
    // h_sigma reports the inner solve's residual; cache G_sigma(b) = (h + b)^{-1}.
    warm_g = entrywise_inverse(hs.value + b);
    return h_a(hs.value + Z, a, p, d) + Z;
  };
  // The subordination iteration is run without averaging.
  FixedPointConfig undamped = cfg;
  undamped.damping = false;
  TransformResult<D2Point> res =
      solve_fixed_point<D2Point>("spn_subordination", step, psi0, undamped);
  if (ctx) {
    ctx->warm_psi = res.value;
    ctx->warm_g = warm_g;
  }
  if (inner_g_iterations) *inner_g_iterations += inner;
  return res;
}

SpnForward spn_forward(Complex z, const SpnParams& params, const FixedPointConfig& cfg,
                       SpnContext* ctx) {
  if (z.imag() <= 0.0) throw std::invalid_argument("spn_cauchy: need Im z > 0");
  const Complex s = std::sqrt(z);  // principal branch: Re >= 0 and Im > 0 on H+
  const D2Point Z{s, s};
  long inner = 0;
  TransformResult<D2Point> psi =
      spn_subordination(Z, params.a, params.sigma, params.p, params.d(), cfg, ctx, &inner);
  TransformResult<D2Point> g = spn_g_sigma(psi.value, params.sigma, params.p, params.d(), cfg,
                                           ctx ? ctx->warm_g : std::nullopt);
  inner += g.iterations_used;
  if (ctx) ctx->warm_g = g.value;
  SpnForward fw;
  fw.sqrt_z = s;
  fw.psi = psi.value;
  fw.g_at_psi = g.value;
  fw.value = g.value.b1 / s;
  fw.outer_iterations = psi.iterations_used;
  fw.inner_iterations = inner;
  fw.residual = std::max(psi.residual, g.residual);
  return fw;
}

TransformResult<Complex> spn_cauchy(Complex z, const SpnParams& params,
                                    const FixedPointConfig& cfg, SpnContext* ctx) {
  const SpnForward fw = spn_forward(z, params, cfg, ctx);
  return {fw.value, fw.inner_iterations, fw.residual};
}

double gamma_slice(const CwParams& params, double x, double gamma, const FixedPointConfig& cfg,
                   CwContext* ctx) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma_slice: need gamma > 0");
  return -cw_cauchy(Complex(x, gamma), params, cfg, ctx).value.imag() / M_PI;
}

double gamma_slice(const SpnParams& params, double x, double gamma, const FixedPointConfig& cfg,
                   SpnContext* ctx) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma_slice: need gamma > 0");
  return -spn_cauchy(Complex(x, gamma), params, cfg, ctx).value.imag() / M_PI;
}

}  // namespace fdecnl::fde
