#ifndef FDECNL_GRAD_HPP
#define FDECNL_GRAD_HPP

#include <vector>

#include "fdecnl/fde.hpp"
#include "fdecnl/types.hpp"

namespace fdecnl::grad {

using fde::CwContext;
using fde::D2Point;
using fde::FixedPointConfig;
using fde::SpnContext;

/// Solve the scalar implicit-function system x = dF_dfix * x + dF_dparam.
/// Requires |dF_dfix| < 1, which holds at any converged fixed point.
Complex implicit_solve_1d(Complex dF_dfix, Complex dF_dparam);

struct CwGradResult {
  fde::TransformResult<Complex> forward;
  ComplexVector dG_dv;  // length p
};

/// Partial derivatives of the compound Wishart Cauchy transform with respect
/// to every v_i, by implicit differentiation of b -> 1/(z - R(b, v)).
CwGradResult cw_grad(Complex z, const fde::CwParams& params, const FixedPointConfig& cfg,
                     CwContext* ctx = nullptr);

struct PsiGrads {
  std::vector<D2Point> d_a;  // length d
  D2Point d_sigma;
};

/// Partial derivatives of the subordination point psi(Z, a, sigma) with
/// respect to a_k and sigma, solving the 2x2 system (I - D_psi Psi) x = rhs.
PsiGrads spn_psi_grads(const D2Point& Z, const Vector& a, double sigma, int p, int d,
                       const FixedPointConfig& cfg, SpnContext* ctx = nullptr);

struct SpnGradResult {
  fde::TransformResult<Complex> forward;
  ComplexVector dG;  // length d+1, packed (dG/da_1, ..., dG/da_d, dG/dsigma)
};

/// Parameter gradient of the signal-plus-noise Cauchy transform, chained
/// through psi and the final G_sigma layer.
SpnGradResult spn_grad(Complex z, const fde::SpnParams& params, const FixedPointConfig& cfg,
                       SpnContext* ctx = nullptr);

}  // namespace fdecnl::grad

#endif  // FDECNL_GRAD_HPP
