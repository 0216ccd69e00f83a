#include "fdecnl/spectra.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "fdecnl/rng.hpp"

namespace fdecnl::spectra {

ComplexMatrix sample_ginibre(const GinibreSpec& spec, std::uint64_t seed) {
  if (spec.p < 1 || spec.d < 1) throw std::invalid_argument("sample_ginibre: p, d must be >= 1");
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(spec.d));
  ComplexMatrix Z(spec.p, spec.d);
  if (spec.field == Field::Real) {
    for (int j = 0; j < spec.d; ++j)
      for (int i = 0; i < spec.p; ++i) Z(i, j) = Complex(sd * rng.gaussian(), 0.0);
  } else {
    const double half = sd / std::sqrt(2.0);
    for (int j = 0; j < spec.d; ++j)
      for (int i = 0; i < spec.p; ++i) {
        const double f = rng.gaussian();
        const double g = rng.gaussian();
        Z(i, j) = Complex(half * f, half * g);
      }
  }
  return Z;
}

Vector eigvals_selfadjoint(const ComplexMatrix& X) {
  if (X.rows() != X.cols()) throw std::invalid_argument("eigvals_selfadjoint: matrix not square");
  const double scale = X.cwiseAbs().maxCoeff();
  const double asym = (X - X.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "eigvals_selfadjoint: input not self-adjoint (max|X - X^*| = " << asym
        << ", max|X| = " << scale << ")";
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(X, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigvals_selfadjoint: eigensolver failed to converge (n = " << X.rows()
        << ", max|X| = " << scale << ")";
    throw NonConvergenceError(msg.str(), asym, -1);
  }
  return solver.eigenvalues();  // ascending
}

Vector eigvals_selfadjoint(const Matrix& X) {
  return eigvals_selfadjoint(ComplexMatrix(X.cast<Complex>()));
}

SpectrumSample sample_cw(const CwParams& params, Field field, std::uint64_t seed) {
  if (params.d < 1 || params.p() < 1) throw std::invalid_argument("sample_cw: p, d must be >= 1");
  const ComplexMatrix Z = sample_ginibre({params.p(), params.d, field}, seed);
  const ComplexMatrix W = Z.adjoint() * params.v.cast<Complex>().asDiagonal() * Z;
  SpectrumSample s;
  s.p = params.p();
  s.d = params.d;
  // Symmetrize away the O(eps) asymmetry of the triple product.
  s.eigenvalues = eigvals_selfadjoint(ComplexMatrix(0.5 * (W + W.adjoint())));
  return s;
}

SpectrumSample sample_spn(const SpnParams& params, Field field, std::uint64_t seed) {
  const int p = params.p;
  const int d = params.d();
  if (p < d || d < 1) throw std::invalid_argument("sample_spn: need p >= d >= 1");
  const ComplexMatrix Z = sample_ginibre({p, d, field}, seed);
  ComplexMatrix A = ComplexMatrix::Zero(p, d);
  for (int k = 0; k < d; ++k) A(k, k) = params.a[k];
  const ComplexMatrix Y = A + params.sigma * Z;
  const ComplexMatrix W = Y.adjoint() * Y;
  SpectrumSample s;
  s.p = p;
  s.d = d;
  s.eigenvalues = eigvals_selfadjoint(ComplexMatrix(0.5 * (W + W.adjoint())));
  return s;
}

std::pair<SpnParams, SpectrumSample> sample_true_spn_experiment(
    int p, int d, int d_true, double lambda_min, double sigma_true, std::uint64_t seed) {
  if (d_true < 0 || d_true > d || d > p) {
    throw std::invalid_argument("sample_true_spn_experiment: need 0 <= d_true <= d <= p");
  }
  SpnParams truth;
  truth.p = p;
  truth.sigma = sigma_true;
  truth.a = Vector::Zero(d);
  Rng signal_rng(derive_seed(seed, 0));
  for (int k = d - d_true; k < d; ++k) truth.a[k] = signal_rng.uniform(lambda_min, 1.0);
  SpectrumSample s = sample_spn(truth, Field::Real, derive_seed(seed, 1));
  return {truth, s};
}

Complex empirical_cauchy(Complex z, const SpectrumSample& s) {
  if (z.imag() <= 0.0) throw std::invalid_argument("empirical_cauchy: need Im z > 0");
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) acc += 1.0 / (z - s.eigenvalues[k]);
  return acc / static_cast<double>(s.eigenvalues.size());
}

double poisson_smooth(double x, double gamma, const SpectrumSample& s) {
  if (gamma <= 0.0) throw std::invalid_argument("poisson_smooth: need gamma > 0");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k)
    acc += poisson_kernel(x - s.eigenvalues[k], gamma);
  return acc / static_cast<double>(s.eigenvalues.size());
}

double moment(const SpectrumSample& s, int k) {
  if (k < 1) throw std::invalid_argument("moment: need k >= 1");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) acc += std::pow(s.eigenvalues[j], k);
  return acc / static_cast<double>(s.eigenvalues.size());
}

}  // namespace fdecnl::spectra
