#ifndef FDECNL_OPTIM_HPP
#define FDECNL_OPTIM_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "fdecnl/fde.hpp"
#include "fdecnl/spectra.hpp"
#include "fdecnl/types.hpp"

namespace fdecnl::optim {

using spectra::SpectrumSample;

/// Adam moment estimates and hyperparameters (Kingma & Ba defaults).
struct AdamState {
  Vector m;
  Vector v;
  long step = 0;
  double alpha = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One Adam update with bias correction; returns the new parameter vector.
Vector adam_step(AdamState& state, const Vector& grad, const Vector& theta);

/// Nearest point of the infinity-norm box [-M, M]^k; idempotent.
Vector project_box(const Vector& theta, double M);

enum class SpnInit { Eigenvalues, SqrtEigenvalues };

/// Initial parameter per model: a uniform box draw for the compound Wishart
/// family; (sample eigenvalues clamped to the box, sigma = 0.2) for the
/// signal-plus-noise family. SqrtEigenvalues initializes a with the square
/// roots of the nonnegative eigenvalues instead.
Vector initial_theta(Model model, const SpectrumSample& sample, double M, std::uint64_t seed,
                     SpnInit spn_init = SpnInit::Eigenvalues);

struct RunConfig {
  double gamma = 0.1;
  long n_iterations = 0;  // N; required >= 1
  double xi = 0.0;        // L1 weight; 0 disables the penalty
  std::uint64_t seed = 0;
  double bound = 1.0;  // projection box M
  fde::FixedPointConfig fixed_point{};
  long record_interval = 0;  // 0 -> max(1, N / 400)
  int failure_budget = 10;   // consecutive non-convergences before aborting
  AdamState adam{};          // hyperparameters; moments are sized at run start
};

struct TraceRecord {
  long iteration = 0;
  double loss_sample = 0.0;
  double validation = 0.0;  // NaN when no ground truth is supplied
  long inner_iterations = 0;  // cumulative
};

using RunTrace = std::vector<TraceRecord>;

struct RunResult {
  Vector theta;
  RunTrace trace;
  long total_inner_iterations = 0;
  long steps = 0;
  long skipped_steps = 0;
  double mean_inner_per_step() const {
    return steps > 0 ? static_cast<double>(total_inner_iterations) / static_cast<double>(steps)
                     : 0.0;
  }
};

using ValidationFn = std::function<double(const Vector&)>;

/// Projected online gradient descent with Adam on the Cauchy noise loss
/// (plus the L1 term when xi > 0). theta packs v for the compound Wishart
/// model and (a_1..a_d, sigma) for signal-plus-noise. Runs exactly N
/// iterations; a non-convergent forward solve skips the step and aborts once
/// the consecutive-failure budget is exhausted.
RunResult run_ogd(const SpectrumSample& sample, Model model, const Vector& theta0,
                  const RunConfig& cfg, const ValidationFn& validation = {});

}  // namespace fdecnl::optim

#endif  // FDECNL_OPTIM_HPP
