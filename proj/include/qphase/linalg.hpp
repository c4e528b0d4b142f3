#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qphase {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Input lies outside the physical or mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operands whose shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical safeguard tripped (e.g. a time grid too coarse to unwrap phases).
class NumericalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Residual thresholds shared by the checks in this library.
struct Tolerances {
  double unitarity = 1e-10;
  double trace = 1e-10;
  double psd = 1e-12;
  double cyclic = 1e-9;
  double lattice = 1e-6;
  double oracle = 1e-6;
};

/// Frobenius norm of U^dagger U - 1.
double unitarity_residual(const CMatrix& U);

bool is_hermitian(const CMatrix& M, double tol);

/// diag(e^{i chi_0}, ..., e^{i chi_{d-1}}).
CMatrix diagonal_phases(const RVector& chi);

/// Maps an angle into (-pi, pi].
double wrap_angle(double x);

/// Branch of arg(z) closest to `reference`.
double nearest_branch(double angle, double reference);

/// exp(i tau G) for Hermitian G via its eigendecomposition.
class HermitianExponential {
 public:
  explicit HermitianExponential(const CMatrix& generator);
  CMatrix at(double tau) const;
  const CMatrix& generator() const { return generator_; }

 private:
  CMatrix generator_;
  CMatrix eigenvectors_;
  RVector eigenvalues_;
};

std::string format_shape(const CMatrix& M);

}  // namespace qphase
