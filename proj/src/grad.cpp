#include "fdecnl/grad.hpp"

#include <Eigen/Dense>

namespace fdecnl::grad {

namespace {

using Eigen::Matrix2cd;
using Eigen::Vector2cd;

Vector2cd to_vec(const D2Point& x) { return Vector2cd(x.b1, x.b2); }
D2Point to_point(const Vector2cd& x) { return {x(0), x(1)}; }

// 2x2 inverse with an explicit determinant guard.
Matrix2cd invert2(const Matrix2cd& M, const char* where) {
  const Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  if (std::abs(det) <= 1e-30) {
    throw SingularDenominatorError(std::string(where) + ": singular 2x2 system");
  }
  Matrix2cd inv;
  inv << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
  return inv / det;
}

double spectral_radius2(const Matrix2cd& M) {
  const Complex tr = M(0, 0) + M(1, 1);
  const Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  return std::max(std::abs(0.5 * (tr + disc)), std::abs(0.5 * (tr - disc)));
}

// eta2 as a complex-linear map on C^2.
Matrix2cd eta2_matrix(int p, int d) {
  Matrix2cd m;
  m << 0.0, static_cast<double>(p) / d, 1.0, 0.0;
  return m;
}

// Derivatives of the inner fixed point g = G_sigma(B), obtained by implicit
// differentiation of g = (B - sigma^2 eta2(g))^{-1}. The self-dependence
// A = D_g of the map must be a strict contraction at a converged g.
struct GSigmaDerivs {
  Matrix2cd dB;
  Vector2cd dsigma;
};

GSigmaDerivs g_sigma_derivs(const D2Point& g, double sigma, int p, int d) {
  const Vector2cd gv = to_vec(g);
  const Vector2cd g2 = gv.array().square();
  const Matrix2cd A = sigma * sigma * g2.asDiagonal() * eta2_matrix(p, d);
  const double rho = spectral_radius2(A);
  if (rho >= 1.0) {
    throw ContractionError("g_sigma_derivs: contraction factor " + std::to_string(rho) +
                           " >= 1 at the inner fixed point");
  }
  const Matrix2cd K = invert2(Matrix2cd(Matrix2cd::Identity() - A), "g_sigma_derivs");
  GSigmaDerivs out;
  out.dB = K * (-g2).asDiagonal().toDenseMatrix();
  out.dsigma = K * (2.0 * sigma * g2.cwiseProduct(to_vec(eta2(g, p, d))));
  return out;
}

// Derivatives of h_sigma(B) = g^{-1} - B through the inner fixed point.
struct HSigmaDerivs {
  Matrix2cd dB;
  Vector2cd dsigma;
};

HSigmaDerivs h_sigma_derivs(const D2Point& g, double sigma, int p, int d) {
  const GSigmaDerivs inner = g_sigma_derivs(g, sigma, p, d);
  const Vector2cd inv_g2 = to_vec(g).array().square().inverse();
  HSigmaDerivs out;
  out.dB = (-inv_g2).asDiagonal() * inner.dB - Matrix2cd::Identity();
  out.dsigma = (-inv_g2).cwiseProduct(inner.dsigma);
  return out;
}

// Value and Jacobian of the closed-form G_a, plus the shared per-k pieces.
struct GaDerivs {
  D2Point value;
  Matrix2cd dB;
  Complex s1;  // sum 1/(q - a_k^2)
  Complex s2;  // sum 1/(q - a_k^2)^2
};

GaDerivs ga_derivs(const D2Point& B, const Vector& a, int p, int d) {
  const Complex q = B.b2 * B.b1;
  Complex s1(0.0, 0.0), s2(0.0, 0.0);
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const Complex den = q - a[k] * a[k];
    if (std::abs(den) <= 1e-30) {
      throw SingularDenominatorError("ga_derivs: b2*b1 - a_k^2 vanishes");
    }
    const Complex inv = 1.0 / den;
    s1 += inv;
    s2 += inv * inv;
  }
  const double dp = static_cast<double>(d);
  const double pp = static_cast<double>(p);
  GaDerivs out;
  out.s1 = s1;
  out.s2 = s2;
  out.value = {B.b2 * s1 / dp, B.b1 * s1 / pp + (pp - dp) / (pp * B.b2)};
  out.dB(0, 0) = -B.b2 * B.b2 * s2 / dp;
  out.dB(0, 1) = (s1 - B.b1 * B.b2 * s2) / dp;
  out.dB(1, 0) = (s1 - B.b1 * B.b2 * s2) / pp;
  out.dB(1, 1) = -B.b1 * B.b1 * s2 / pp - (pp - dp) / (pp * B.b2 * B.b2);
  return out;
}

Vector2cd ga_da_k(const D2Point& B, double a_k, int p, int d) {
  const Complex q = B.b2 * B.b1;
  const Complex den = q - a_k * a_k;
  const Complex t = 2.0 * a_k / (den * den);
  return Vector2cd(B.b2 * t / static_cast<double>(d), B.b1 * t / static_cast<double>(p));
}

// Everything the chain rule needs at a converged subordination point.
struct PsiDerivAssembly {
  Matrix2cd d_psi_Psi;   // D_psi Psi
  Matrix2cd solve;       // (I - D_psi Psi)^{-1}
  Matrix2cd dh_a_W;      // D h_a at W = h_sigma(psi) + Z
  Vector2cd dh_sigma_ds; // d h_sigma / d sigma at psi
  D2Point W;
  Vector2cd inv_u2;      // 1/G_a(W)^2 entrywise
};

PsiDerivAssembly assemble_psi_derivs(const D2Point& Z, const D2Point& psi, const D2Point& g_at_psi,
                                     const Vector& a, double sigma, int p, int d) {
  PsiDerivAssembly out;
  const HSigmaDerivs hs = h_sigma_derivs(g_at_psi, sigma, p, d);
  out.W = fde::entrywise_inverse(g_at_psi) - psi + Z;  // h_sigma(psi) + Z
  const GaDerivs ga = ga_derivs(out.W, a, p, d);
  out.inv_u2 = to_vec(ga.value).array().square().inverse();
  out.dh_a_W = (-out.inv_u2).asDiagonal() * ga.dB - Matrix2cd::Identity();
  out.dh_sigma_ds = hs.dsigma;
  out.d_psi_Psi = out.dh_a_W * hs.dB;
  const double rho = spectral_radius2(out.d_psi_Psi);
  if (rho >= 1.0) {
    throw ContractionError("spn_psi_grads: contraction factor " + std::to_string(rho) +
                           " >= 1 at the subordination point");
  }
  out.solve = invert2(Matrix2cd(Matrix2cd::Identity() - out.d_psi_Psi), "spn_psi_grads");
  return out;
}

PsiGrads psi_grads_from(const PsiDerivAssembly& asmb, const Vector& a, double sigma, int p,
                        int d) {
  PsiGrads out;
  out.d_a.resize(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const Vector2cd dh_a_dak = (-asmb.inv_u2).cwiseProduct(ga_da_k(asmb.W, a[k], p, d));
    out.d_a[k] = to_point(asmb.solve * dh_a_dak);
  }
  out.d_sigma = to_point(asmb.solve * (asmb.dh_a_W * asmb.dh_sigma_ds));
  (void)sigma;
  return out;
}

}  // namespace

Complex implicit_solve_1d(Complex dF_dfix, Complex dF_dparam) {
  const double mag = std::abs(dF_dfix);
  if (mag >= 1.0) {
    throw ContractionError("implicit_solve_1d: contraction factor " + std::to_string(mag) +
                           " >= 1");
  }
  return dF_dparam / (1.0 - dF_dfix);
}

CwGradResult cw_grad(Complex z, const fde::CwParams& params, const FixedPointConfig& cfg,
                     CwContext* ctx) {
  CwGradResult out;
  out.forward = fde::cw_cauchy(z, params, cfg, ctx);
  const Complex G = out.forward.value;
  const Complex G2 = G * G;
  const double d = static_cast<double>(params.d);
  // D_b of b -> (z - R(b, v))^{-1} at the fixed point is G^2 R'(G).
  Complex rprime(0.0, 0.0);
  for (Eigen::Index i = 0; i < params.v.size(); ++i) {
    const Complex t = 1.0 / (1.0 - params.v[i] * G);
    rprime += params.v[i] * params.v[i] * t * t;
  }
  rprime /= d;
  const Complex self = G2 * rprime;
  out.dG_dv.resize(params.v.size());
  for (Eigen::Index i = 0; i < params.v.size(); ++i) {
    const Complex t = 1.0 / (1.0 - params.v[i] * G);
    out.dG_dv[i] = implicit_solve_1d(self, G2 * t * t / d);
  }
  return out;
}

PsiGrads spn_psi_grads(const D2Point& Z, const Vector& a, double sigma, int p, int d,
                       const FixedPointConfig& cfg, SpnContext* ctx) {
  long inner = 0;
  const auto psi = fde::spn_subordination(Z, a, sigma, p, d, cfg, ctx, &inner);
  const auto g = fde::spn_g_sigma(psi.value, sigma, p, d, cfg, ctx ? ctx->warm_g : std::nullopt);
  const PsiDerivAssembly asmb = assemble_psi_derivs(Z, psi.value, g.value, a, sigma, p, d);
  return psi_grads_from(asmb, a, sigma, p, d);
}

SpnGradResult spn_grad(Complex z, const fde::SpnParams& params, const FixedPointConfig& cfg,
                       SpnContext* ctx) {
  const fde::SpnForward fw = fde::spn_forward(z, params, cfg, ctx);
  const int d = params.d();
  const D2Point Z{fw.sqrt_z, fw.sqrt_z};
  const PsiDerivAssembly asmb =
      assemble_psi_derivs(Z, fw.psi, fw.g_at_psi, params.a, params.sigma, params.p, d);
  const PsiGrads pg = psi_grads_from(asmb, params.a, params.sigma, params.p, d);
  const GSigmaDerivs gs = g_sigma_derivs(fw.g_at_psi, params.sigma, params.p, d);

  SpnGradResult out;
  out.forward = {fw.value, fw.inner_iterations, fw.residual};
  out.dG.resize(d + 1);
  for (int k = 0; k < d; ++k) {
    out.dG[k] = (gs.dB * to_vec(pg.d_a[k]))(0) / fw.sqrt_z;
  }
  out.dG[d] = ((gs.dB * to_vec(pg.d_sigma))(0) + gs.dsigma(0)) / fw.sqrt_z;
  return out;
}

}  // namespace fdecnl::grad
