#include "qphase/linalg.hpp"

#include <cmath>

namespace qphase {

double unitarity_residual(const CMatrix& U) {
  if (U.rows() != U.cols()) {
    throw DimensionError("unitarity check on non-square matrix " + format_shape(U));
  }
  return (U.adjoint() * U - CMatrix::Identity(U.rows(), U.cols())).norm();
}

bool is_hermitian(const CMatrix& M, double tol) {
  return M.rows() == M.cols() && (M - M.adjoint()).norm() <= tol;
}

CMatrix diagonal_phases(const RVector& chi) {
  CMatrix out = CMatrix::Zero(chi.size(), chi.size());
  for (Eigen::Index n = 0; n < chi.size(); ++n) {
    out(n, n) = std::polar(1.0, chi(n));
  }
  return out;
}

double wrap_angle(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double nearest_branch(double angle, double reference) {
  return reference + wrap_angle(angle - reference);
}

HermitianExponential::HermitianExponential(const CMatrix& generator) : generator_(generator) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(generator_);
  eigenvectors_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues();
}

CMatrix HermitianExponential::at(double tau) const {
  CVector phases(eigenvalues_.size());
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    phases(k) = std::polar(1.0, eigenvalues_(k) * tau);
  }
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

std::string format_shape(const CMatrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

}  // namespace qphase
