#ifndef FDECNL_RECOVER_HPP
#define FDECNL_RECOVER_HPP

#include <cstdint>

#include "fdecnl/loss.hpp"
#include "fdecnl/optim.hpp"
#include "fdecnl/spectra.hpp"
#include "fdecnl/types.hpp"

namespace fdecnl::recover {

using spectra::SpectrumSample;

/// Baseline rank estimate: strict count of eigenvalues above delta.
int baseline_rank(const SpectrumSample& s, double delta);

/// Above-threshold count of signal coordinates, #{ j : |a_j| > xi0 }.
int rank_from_signal(const Vector& a, double xi0);

/// Validation losses: Euclidean distance of ascending-sorted parameter
/// vectors (plus the |sigma| gap for the signal-plus-noise model).
double v_cw(const Vector& b, const Vector& b_true);
double v_spn(const Vector& a, double sigma, const Vector& a_true, double sigma_true);

struct RankResult {
  int estimated_rank = 0;
  Vector a_hat;
  double sigma_hat = 0.0;
  double threshold = 0.0;
  optim::RunResult run;
};

/// L1-regularized rank recovery: optimize the signal-plus-noise model with
/// the penalized loss, then count coordinates above the threshold xi0.
RankResult recover_rank(const SpectrumSample& s, const optim::RunConfig& cfg, double xi0,
                        optim::SpnInit init = optim::SpnInit::Eigenvalues,
                        const optim::ValidationFn& validation = {});

struct GapReport {
  double gamma = 0.0;
  int d = 0;
  double empirical_entropy = 0.0;      // against the smoothed sample spectrum
  double deterministic_entropy = 0.0;  // against the reference model slice
  double gap = 0.0;
  double quadrature_bound = 0.0;
};

/// Determination gap at (theta0, theta): the empirical cross-entropy uses a
/// fresh sample drawn at theta0 as the reference, the deterministic one uses
/// the theta0 model slice; both integrate the theta loss on the same grid.
GapReport determination_gap(const Vector& theta0, const Vector& theta, Model model, double gamma,
                            int p, int d, std::uint64_t seed, const loss::QuadratureConfig& quad,
                            const fde::FixedPointConfig& cfg);

/// One cell of the dimensionality-recovery sweep.
struct SweepCell {
  int d_true = 0;
  double lambda_min = 0.0;
  std::uint64_t seed = 0;
  int estimated_rank = 0;
  int baseline = 0;
  double validation = 0.0;
  double runtime_seconds = 0.0;
};

SweepCell run_recovery_cell(int p, int d, int d_true, double lambda_min, double sigma_true,
                            double delta, const optim::RunConfig& base_cfg, double xi0,
                            std::uint64_t seed,
                            optim::SpnInit init = optim::SpnInit::Eigenvalues);

}  // namespace fdecnl::recover

#endif  // FDECNL_RECOVER_HPP
