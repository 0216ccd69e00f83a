#ifndef FDECNL_TYPES_HPP
#define FDECNL_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fdecnl {

using Real = double;
using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class Model { Cw, Spn };

inline const char* model_name(Model m) { return m == Model::Cw ? "cw" : "spn"; }

/// Thrown when a fixed-point iteration exhausts its iteration cap.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual;
  long iterations;
};

/// Thrown when a derivative is requested at a point where the fixed-point map
/// is not a contraction (|D| >= 1); signals an unconverged forward solve.
class ContractionError : public std::runtime_error {
 public:
  explicit ContractionError(const std::string& what) : std::runtime_error(what) {}
};

class SingularDenominatorError : public std::runtime_error {
 public:
  explicit SingularDenominatorError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdecnl

#endif  // FDECNL_TYPES_HPP
