#ifndef FDECNL_FDE_HPP
#define FDECNL_FDE_HPP

#include <cmath>
#include <optional>

#include "fdecnl/spectra.hpp"
#include "fdecnl/types.hpp"

namespace fdecnl::fde {

using spectra::CwParams;
using spectra::SpnParams;

/// Element of the two-block diagonal algebra D_2 ~ C^2.
struct D2Point {
  Complex b1{};
  Complex b2{};
};

inline D2Point operator+(const D2Point& x, const D2Point& y) { return {x.b1 + y.b1, x.b2 + y.b2}; }
inline D2Point operator-(const D2Point& x, const D2Point& y) { return {x.b1 - y.b1, x.b2 - y.b2}; }
inline D2Point operator*(double c, const D2Point& x) { return {c * x.b1, c * x.b2}; }

/// Entrywise inverse; D_2 is commutative so this is the algebra inverse.
inline D2Point entrywise_inverse(const D2Point& x) { return {1.0 / x.b1, 1.0 / x.b2}; }

/// Euclidean norm on C^2.
inline double norm2(const D2Point& x) { return std::sqrt(std::norm(x.b1) + std::norm(x.b2)); }

inline bool in_upper_half(const D2Point& x) { return x.b1.imag() > 0.0 && x.b2.imag() > 0.0; }
inline bool in_lower_half(const D2Point& x) { return x.b1.imag() < 0.0 && x.b2.imag() < 0.0; }

/// Covariance map of the linearized rectangular Gaussian block on D_2:
/// eta2(x, y) = ((p/d) y, x).
inline D2Point eta2(const D2Point& b, int p, int d) {
  return {(static_cast<double>(p) / d) * b.b2, b.b1};
}

struct FixedPointConfig {
  double tolerance = 1e-8;
  long max_iterations = 100000;
  bool damping = true;  // averaged map B -> B/2 + G(B)/2 for method-I iterations
};

template <typename V>
struct TransformResult {
  V value{};
  long iterations_used = 0;
  double residual = 0.0;
};

/// Warm-start caches. One context per evaluation run (e.g. one optimizer run
/// or one grid sweep); never share a context across concurrent runs.
struct CwContext {
  std::optional<Complex> warm;
};
struct SpnContext {
  std::optional<D2Point> warm_psi;
  std::optional<D2Point> warm_g;
};

/// R-transform of the compound Wishart family: R(b, v) = (1/d) sum v_i / (1 - v_i b).
Complex cw_r(Complex b, const Vector& v, int d);

/// Cauchy transform of the compound Wishart deterministic equivalent at
/// Im z > 0: the fixed point of b -> 1/(z - R(b, v)), iterated with the
/// averaged map from b0 = -i (or the warm start).
TransformResult<Complex> cw_cauchy(Complex z, const CwParams& params, const FixedPointConfig& cfg,
                                   CwContext* ctx = nullptr);

/// D_2-valued Cauchy transform of sigma * (bottom-left Gaussian block):
/// fixed point of B -> (Z - sigma^2 eta2(B))^{-1} entrywise, B in the lower
/// half-plane. sigma = 0 short-circuits to Z^{-1}.
TransformResult<D2Point> spn_g_sigma(const D2Point& Z, double sigma, int p, int d,
                                     const FixedPointConfig& cfg,
                                     std::optional<D2Point> warm = std::nullopt);

/// Closed-form D_2-valued Cauchy transform of the embedded signal matrix:
/// G_a(b1, b2) = ((b2/d) S, (b1/p) S + (p-d)/(p b2)) with
/// S = sum_k 1/(b2 b1 - a_k^2). O(d) per evaluation.
D2Point spn_g_a(const D2Point& B, const Vector& a, int p, int d);

/// h-transforms h_x(B) = G_x(B)^{-1} - B used by the subordination iteration.
D2Point h_a(const D2Point& B, const Vector& a, int p, int d);
TransformResult<D2Point> h_sigma(const D2Point& B, double sigma, int p, int d,
                                 const FixedPointConfig& cfg,
                                 std::optional<D2Point> warm = std::nullopt);

/// Subordination fixed point psi of Psi(B) = h_a(h_sigma(B) + Z) + Z,
/// iterated without averaging from (i, i) (or the warm start).
/// iterations_used counts outer Psi applications; inner_g_iterations, when
/// non-null, accumulates the inner g_sigma iteration total.
TransformResult<D2Point> spn_subordination(const D2Point& Z, const Vector& a, double sigma, int p,
                                           int d, const FixedPointConfig& cfg,
                                           SpnContext* ctx = nullptr,
                                           long* inner_g_iterations = nullptr);

/// Full forward pass for the signal-plus-noise transform, kept for reuse by
/// the gradient path (psi and g_at_psi feed the implicit differentiation).
struct SpnForward {
  Complex value{};        // G(z)
  Complex sqrt_z{};       // principal branch
  D2Point psi{};          // subordination point at sqrt(z) I_2
  D2Point g_at_psi{};     // G_sigma(psi)
  long outer_iterations = 0;
  long inner_iterations = 0;  // total g_sigma applications
  double residual = 0.0;      // max of psi / g residuals
};

SpnForward spn_forward(Complex z, const SpnParams& params, const FixedPointConfig& cfg,
                       SpnContext* ctx = nullptr);

/// Cauchy transform of the signal-plus-noise deterministic equivalent:
/// G(z) = (1/sqrt(z)) G_sigma(psi(sqrt(z) I_2, a, sigma))_1.
/// iterations_used reports the total inner g_sigma count.
TransformResult<Complex> spn_cauchy(Complex z, const SpnParams& params,
                                    const FixedPointConfig& cfg, SpnContext* ctx = nullptr);

/// gamma-slice -Im G(x + i gamma) / pi of the deterministic equivalent.
double gamma_slice(const CwParams& params, double x, double gamma, const FixedPointConfig& cfg,
                   CwContext* ctx = nullptr);
double gamma_slice(const SpnParams& params, double x, double gamma, const FixedPointConfig& cfg,
                   SpnContext* ctx = nullptr);

}  // namespace fdecnl::fde

#endif  // FDECNL_FDE_HPP
