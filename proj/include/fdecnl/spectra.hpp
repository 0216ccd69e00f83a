#ifndef FDECNL_SPECTRA_HPP
#define FDECNL_SPECTRA_HPP

#include <cstdint>
#include <utility>

#include "fdecnl/types.hpp"

namespace fdecnl::spectra {

enum class Field { Real, Complex };

/// Rectangular Gaussian matrix with i.i.d. entries of variance 1/d
/// (complex entries are (f + ig)/sqrt(2) with f, g independent N(0, 1/d)).
struct GinibreSpec {
  int p = 1;
  int d = 1;
  Field field = Field::Real;
};

/// Ascending eigenvalues of one observed d x d self-adjoint sample matrix.
struct SpectrumSample {
  Vector eigenvalues;  // ascending, length d
  int p = 0;
  int d = 0;
};

/// Compound Wishart parameters: W = Z^* diag(v) Z with v in R^p, |v_i| <= bound.
struct CwParams {
  Vector v;
  int d = 0;
  double bound = 1.0;
  int p() const { return static_cast<int>(v.size()); }
  bool feasible() const { return v.size() == 0 || v.cwiseAbs().maxCoeff() <= bound; }
};

/// Signal-plus-noise parameters: W = (A + sigma Z)^*(A + sigma Z) with
/// A the p x d rectangular diagonal matrix of a in R^d; |a_k|, |sigma| <= bound.
struct SpnParams {
  Vector a;
  double sigma = 0.0;
  int p = 0;
  double bound = 1.2;
  int d() const { return static_cast<int>(a.size()); }
  bool feasible() const {
    return (a.size() == 0 || a.cwiseAbs().maxCoeff() <= bound) && std::abs(sigma) <= bound;
  }
};

/// Draw a p x d Ginibre matrix. Entries are generated in column-major order;
/// the real field leaves the imaginary part zero. Deterministic given seed.
ComplexMatrix sample_ginibre(const GinibreSpec& spec, std::uint64_t seed);

/// Ascending eigenvalues of a numerically self-adjoint matrix.
/// Requires max|X - X^*| < 1e-10 * max|X| entrywise.
Vector eigvals_selfadjoint(const ComplexMatrix& X);
Vector eigvals_selfadjoint(const Matrix& X);

/// One observation of the compound Wishart model W = Z^* diag(v) Z.
SpectrumSample sample_cw(const CwParams& params, Field field, std::uint64_t seed);

/// One observation of the signal-plus-noise model W = (A + sigma Z)^*(A + sigma Z).
SpectrumSample sample_spn(const SpnParams& params, Field field, std::uint64_t seed);

/// Ground truth and sample for the rank-recovery experiment: the signal array
/// is (0, ..., 0, x_1, ..., x_{d_true}) with x_i ~ U[lambda_min, 1]. The
/// orthogonal conjugation of the signal matrix is omitted; the spectrum law
/// is invariant under it and only eigenvalues are consumed downstream.
std::pair<SpnParams, SpectrumSample> sample_true_spn_experiment(
    int p, int d, int d_true, double lambda_min, double sigma_true, std::uint64_t seed);

/// Empirical Cauchy transform (1/d) sum_k 1/(z - lambda_k), Im z > 0.
Complex empirical_cauchy(Complex z, const SpectrumSample& s);

/// Poisson-kernel smoothing of the empirical measure,
/// (1/d) sum_k P_gamma(x - lambda_k); equals -Im(empirical_cauchy)/pi.
double poisson_smooth(double x, double gamma, const SpectrumSample& s);

/// Poisson kernel (Cauchy density) of scale gamma.
inline double poisson_kernel(double x, double gamma) {
  return gamma / ((x * x + gamma * gamma) * M_PI);
}

/// k-th spectral moment (1/d) sum_k lambda_k^k.
double moment(const SpectrumSample& s, int k);

}  // namespace fdecnl::spectra

#endif  // FDECNL_SPECTRA_HPP
