#ifndef FDECNL_LOSS_HPP
#define FDECNL_LOSS_HPP

#include <cstdint>
#include <functional>

#include "fdecnl/fde.hpp"
#include "fdecnl/rng.hpp"
#include "fdecnl/spectra.hpp"
#include "fdecnl/types.hpp"

namespace fdecnl::loss {

using fde::CwContext;
using fde::FixedPointConfig;
using fde::SpnContext;
using spectra::CwParams;
using spectra::SpectrumSample;
using spectra::SpnParams;

/// Inverse CDF of the Cauchy distribution of scale gamma at u in (0, 1).
inline double cauchy_icdf(double gamma, double u) {
  return gamma * std::tan(M_PI * (u - 0.5));
}

/// One Cauchy(0, gamma) draw by exact inverse-CDF sampling.
inline double draw_cauchy(double gamma, Rng& rng) {
  return cauchy_icdf(gamma, rng.uniform_open());
}

/// Cauchy noise loss at a point: -log of the gamma-slice of the model.
double cnl_value(double x, const CwParams& params, double gamma, const FixedPointConfig& cfg,
                 CwContext* ctx = nullptr);
double cnl_value(double x, const SpnParams& params, double gamma, const FixedPointConfig& cfg,
                 SpnContext* ctx = nullptr);

/// Parameter gradient of the Cauchy noise loss,
/// grad l = -Im(grad G) / Im(G) at z = x + i gamma, elementwise.
Vector cnl_grad(double x, const CwParams& params, double gamma, const FixedPointConfig& cfg,
                CwContext* ctx = nullptr);
Vector cnl_grad(double x, const SpnParams& params, double gamma, const FixedPointConfig& cfg,
                SpnContext* ctx = nullptr);

/// Value and gradient from one shared forward solve (the optimizer path).
struct LossEval {
  double value = 0.0;
  Vector grad;
  long inner_iterations = 0;
  double residual = 0.0;
};
LossEval cnl_value_grad(double x, const CwParams& params, double gamma,
                        const FixedPointConfig& cfg, CwContext* ctx = nullptr);
LossEval cnl_value_grad(double x, const SpnParams& params, double gamma,
                        const FixedPointConfig& cfg, SpnContext* ctx = nullptr);

struct CceEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of the Cauchy cross-entropy of the model against a
/// sample: mean of the loss at lambda_j + T over independent (j, T) pairs.
CceEstimate ecce_monte_carlo(const SpectrumSample& s, const CwParams& params, double gamma,
                             long n_draws, std::uint64_t seed, const FixedPointConfig& cfg);
CceEstimate ecce_monte_carlo(const SpectrumSample& s, const SpnParams& params, double gamma,
                             long n_draws, std::uint64_t seed, const FixedPointConfig& cfg);

struct QuadratureConfig {
  double half_width = 50.0;  // integrate over [-L, L]
  int points = 2001;
};

/// Trapezoid-rule Cauchy cross-entropy against an explicit reference density
/// (a smoothed empirical measure or another model slice). standard_error
/// reports the Cauchy-tail truncation estimate, O(log L / L).
CceEstimate ecce_quadrature(const std::function<double(double)>& reference_slice,
                            const CwParams& params, double gamma, const QuadratureConfig& quad,
                            const FixedPointConfig& cfg);
CceEstimate ecce_quadrature(const std::function<double(double)>& reference_slice,
                            const SpnParams& params, double gamma, const QuadratureConfig& quad,
                            const FixedPointConfig& cfg);

/// L1 penalty xi * ||a||_1 and its subgradient (sign(0) := 0).
double l1_penalty(const Vector& a, double xi);
Vector l1_subgrad(const Vector& a, double xi);

}  // namespace fdecnl::loss

#endif  // FDECNL_LOSS_HPP
