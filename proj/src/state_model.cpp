#include "qphase/state_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qphase {

namespace {

// Orthonormal vectors spanning the column space of `span`, built from the
// standard basis vectors projected in order (skipping those with no
// projection), phase-fixed so the first nonzero component is real positive.
CMatrix canonical_basis(const CMatrix& span, int count) {
  const Eigen::Index n = span.rows();
  const CMatrix projector = span * span.adjoint();
  CMatrix out(n, count);
  int found = 0;
  for (Eigen::Index i = 0; i < n && found < count; ++i) {
    CVector w = projector.col(i);
    for (int k = 0; k < found; ++k) w -= out.col(k).dot(w) * out.col(k);
    // a second pass keeps Gram-Schmidt stable for nearly dependent inputs
    for (int k = 0; k < found; ++k) w -= out.col(k).dot(w) * out.col(k);
    const double norm = w.norm();
    if (norm < 1e-8) continue;
    out.col(found++) = w / norm;
  }
  if (found != count) throw std::logic_error("canonical_basis: subspace rank deficit");
  return out;
}

// Orthonormal completion of the columns of `partial` to a full basis of C^n,
// Gram-Schmidt over the standard basis vectors in order.
CMatrix complete_basis(const CMatrix& partial, Eigen::Index n) {
  CMatrix out(n, n);
  const Eigen::Index have = partial.cols();
  out.leftCols(have) = partial;
  Eigen::Index found = have;
  for (Eigen::Index i = 0; i < n && found < n; ++i) {
    CVector w = CVector::Unit(n, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < found; ++k) w -= out.col(k).dot(w) * out.col(k);
    }
    const double norm = w.norm();
    if (norm < 1e-8) continue;
    out.col(found++) = w / norm;
  }
  return out;
}

void make_first_component_positive(CVector& v, CVector* partner) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      const Complex phase = std::conj(v(i)) / std::abs(v(i));
      v *= phase;
      if (partner != nullptr) *partner *= phase;
      return;
    }
  }
}

}  // namespace

QuditDensity density_from_purity(const GeneratorBasis& basis, double q, const RVector& q_hat,
                                 const Tolerances& tol) {
  const int d = basis.dim();
  if (q < 0.0 || q > 1.0) throw DomainError("purity q must lie in [0,1], got " + std::to_string(q));
  if (q_hat.size() != basis.size()) {
    throw DimensionError("purity direction must have length " + std::to_string(basis.size()));
  }
  if (q > 0.0 && std::abs(q_hat.norm() - 1.0) > 1e-12) {
    throw DomainError("purity direction is not a unit vector (|q_hat| = " +
                      std::to_string(q_hat.norm()) + ")");
  }
  QuditDensity out;
  out.d = d;
  out.q = q;
  out.q_hat = q > 0.0 ? q_hat : RVector::Zero(basis.size());
  out.rho = CMatrix::Identity(d, d) / static_cast<double>(d) +
            q * std::sqrt((d - 1.0) / d) * basis.combine(q_hat);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(out.rho, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < -tol.psd) {
    throw DomainError("density matrix not positive semidefinite: eigenvalue " +
                      std::to_string(lowest));
  }
  return out;
}

QuditDensity density_from_matrix(const GeneratorBasis& basis, const CMatrix& rho,
                                 const Tolerances& tol) {
  const int d = basis.dim();
  if (rho.rows() != d || rho.cols() != d) {
    throw DimensionError("density matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (!is_hermitian(rho, tol.unitarity)) throw DomainError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol.trace) throw DomainError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol.psd) {
    throw DomainError("density matrix not positive semidefinite: eigenvalue " +
                      std::to_string(eig.eigenvalues().minCoeff()));
  }
  const double purity = (rho * rho).trace().real();
  const double q2 = (d * purity - 1.0) / (d - 1.0);
  QuditDensity out;
  out.d = d;
  out.rho = rho;
  out.q = std::sqrt(std::clamp(q2, 0.0, 1.0));
  out.q_hat = RVector::Zero(basis.size());
  if (out.q > 1e-14) {
    out.q_hat = basis.coordinates(rho - CMatrix::Identity(d, d) / static_cast<double>(d)) /
                (out.q * std::sqrt((d - 1.0) / d));
  }
  return out;
}

DiagonalProfile DiagonalProfile::from_direction(const GeneratorBasis& basis,
                                                const RVector& q_hat_cartan) {
  if (q_hat_cartan.size() != basis.cartan_size()) {
    throw DimensionError("Cartan direction must have length " +
                         std::to_string(basis.cartan_size()));
  }
  DiagonalProfile p{RVector::Zero(basis.dim())};
  for (int b = 0; b < basis.cartan_size(); ++b) p.x += q_hat_cartan(b) * basis[b].diagonal().real();
  p.validate();
  return p;
}

DiagonalProfile DiagonalProfile::from_angle(const GeneratorBasis& basis, double theta) {
  RVector dir = RVector::Zero(basis.cartan_size());
  if (basis.dim() == 2) {
    if (theta != 0.0) throw DomainError("a qubit profile has no angle; theta must be 0");
    dir(0) = 1.0;
  } else {
    dir(0) = std::cos(theta);
    dir(1) = std::sin(theta);
  }
  return from_direction(basis, dir);
}

DiagonalProfile DiagonalProfile::from_weights(const RVector& diagonal, double w) {
  if (!(w > 0.0)) throw DomainError("profile weight must be positive");
  const double d = static_cast<double>(diagonal.size());
  DiagonalProfile p{(diagonal.array() - 1.0 / d) / w};
  p.validate(1e-9);
  return p;
}

void DiagonalProfile::validate(double tol) const {
  if (std::abs(x.sum()) > tol) {
    throw DomainError("diagonal profile must sum to zero, sum = " + std::to_string(x.sum()));
  }
  if (std::abs(x.squaredNorm() - 1.0) > tol) {
    throw DomainError("diagonal profile must have unit norm, |x|^2 = " +
                      std::to_string(x.squaredNorm()));
  }
}

double qutrit_theta_bound(double q) {
  if (q < 0.0 || q > 1.0) throw DomainError("purity q must lie in [0,1], got " + std::to_string(q));
  if (q <= 0.5) return kPi / 3.0;
  return std::acos(-1.0 / (2.0 * q)) - 2.0 * kPi / 3.0;
}

CoefficientMatrix::CoefficientMatrix(CMatrix alpha, double norm_tol) : alpha_(std::move(alpha)) {
  if (alpha_.rows() < 2 || alpha_.rows() > alpha_.cols()) {
    throw DimensionError("coefficient matrix must be d_A x d_B with 2 <= d_A <= d_B, got " +
                         format_shape(alpha_));
  }
  const double norm2 = alpha_.squaredNorm();
  if (std::abs(norm2 - 1.0) > norm_tol) {
    throw DomainError("coefficient matrix not normalized: Tr[alpha^dagger alpha] = " +
                      std::to_string(norm2));
  }
}

CoefficientMatrix CoefficientMatrix::normalized(CMatrix alpha) {
  const double n = alpha.norm();
  if (n == 0.0) throw DomainError("cannot normalize a zero coefficient matrix");
  return CoefficientMatrix(alpha / n);
}

Complex CoefficientMatrix::overlap(const CoefficientMatrix& other) const {
  return (alpha_.adjoint() * other.alpha_).trace();
}

CMatrix SchmidtForm::K(int d_B) const {
  CMatrix k = CMatrix::Zero(Q.size(), d_B);
  for (Eigen::Index i = 0; i < Q.size(); ++i) k(i, i) = Q(i);
  return k;
}

CMatrix SchmidtForm::reconstruct() const {
  return std::polar(1.0, phi) * S_A * K(static_cast<int>(S_B.rows())) * S_B.transpose();
}

SchmidtForm schmidt_decompose(const CoefficientMatrix& alpha) {
  const CMatrix& A = alpha.matrix();
  const int dA = alpha.d_A();
  const int dB = alpha.d_B();

  Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector s = svd.singularValues();
  const CMatrix& rawU = svd.matrixU();

  // Left singular vectors, block by degenerate block.
  CMatrix U(dA, dA);
  const double degenerate_tol = 1e-9 * std::max(1.0, s(0));
  for (int begin = 0; begin < dA;) {
    int end = begin + 1;
    while (end < dA && std::abs(s(end) - s(begin)) <= degenerate_tol) ++end;
    U.middleCols(begin, end - begin) =
        canonical_basis(rawU.middleCols(begin, end - begin), end - begin);
    begin = end;
  }

  // Right singular vectors from the left ones where the singular value is
  // nonzero; the rest complete the basis.
  const double zero_tol = 1e-12;
  int rank = 0;
  while (rank < dA && s(rank) > zero_tol) ++rank;
  CMatrix Vpart(dB, rank);
  for (int k = 0; k < rank; ++k) {
    CVector u = U.col(k);
    make_first_component_positive(u, nullptr);
    U.col(k) = u;
    Vpart.col(k) = A.adjoint() * u / s(k);
  }
  for (int k = rank; k < dA; ++k) {
    CVector u = U.col(k);
    make_first_component_positive(u, nullptr);
    U.col(k) = u;
  }
  CMatrix V = complete_basis(Vpart, dB);

  SchmidtForm out;
  out.Q = s;
  for (int k = rank; k < dA; ++k) out.Q(k) = 0.0;

  // alpha = U K V^dagger, so S_B^T = V^dagger.
  CMatrix SB = V.conjugate();
  const double a = std::arg(U.determinant());
  out.S_A = U * std::polar(1.0, -a / dA);
  out.phi = a / dA;

  const double b = std::arg(SB.determinant());
  if (dB > dA) {
    SB.col(dB - 1) *= std::polar(1.0, -b);
  } else if (rank < dA) {
    // the last column multiplies a zero singular value
    SB.col(dB - 1) *= std::polar(1.0, -b);
  } else {
    SB *= std::polar(1.0, -b / dB);
    out.phi += b / dB;
  }
  out.S_B = std::move(SB);
  out.phi = wrap_angle(out.phi);
  return out;
}

std::pair<CMatrix, CMatrix> reduced_densities(const CoefficientMatrix& alpha) {
  const CMatrix& A = alpha.matrix();
  return {A * A.adjoint(), (A.adjoint() * A).transpose()};
}

double EntanglementReport::weight_A() const {
  return std::sqrt(std::max(0.0, (C_m * C_m - C * C) / 2.0));
}

double EntanglementReport::weight_B() const {
  const double w = std::max(0.0, (C_m * C_m - C * C) / 2.0);
  return std::sqrt(w + static_cast<double>(d_B - d_A) / (d_A * d_B));
}

EntanglementReport entanglement_report(const CoefficientMatrix& alpha) {
  EntanglementReport r;
  r.d_A = alpha.d_A();
  r.d_B = alpha.d_B();
  const CMatrix rhoA = alpha.matrix() * alpha.matrix().adjoint();
  const double purity = (rhoA * rhoA).trace().real();
  r.C = std::sqrt(std::max(0.0, 2.0 * (1.0 - purity)));
  r.C_m = std::sqrt(2.0 * (r.d_A - 1.0) / r.d_A);
  r.q_A = std::sqrt(std::clamp((r.d_A * purity - 1.0) / (r.d_A - 1.0), 0.0, 1.0));
  r.q_B = std::sqrt(std::clamp((r.d_B * purity - 1.0) / (r.d_B - 1.0), 0.0, 1.0));

  Eigen::JacobiSVD<CMatrix> svd(alpha.matrix());
  const RVector s = svd.singularValues();
  const RVector s2 = s.array().square();
  RVector power = s2;
  for (int p = 1; p <= r.d_A; ++p) {
    r.traces.push_back(power.sum());
    power = power.cwiseProduct(s2);
  }
  r.D = s.prod();
  return r;
}

CoefficientMatrix apply_local(const CoefficientMatrix& alpha, const CMatrix& U_A,
                              const CMatrix& U_B, const Tolerances& tol) {
  if (U_A.rows() != alpha.d_A() || U_A.cols() != alpha.d_A() || U_B.rows() != alpha.d_B() ||
      U_B.cols() != alpha.d_B()) {
    throw DimensionError("apply_local: operators " + format_shape(U_A) + ", " + format_shape(U_B) +
                         " do not match state " + format_shape(alpha.matrix()));
  }
  if (unitarity_residual(U_A) > tol.unitarity || unitarity_residual(U_B) > tol.unitarity) {
    throw DomainError("apply_local: local operator is not unitary");
  }
  return CoefficientMatrix(U_A * alpha.matrix() * U_B.transpose());
}

CoefficientMatrix diagonal_state(const RVector& x, double weight) {
  const auto d = x.size();
  CMatrix alpha = CMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    const double p = 1.0 / static_cast<double>(d) + weight * x(n);
    if (p < -1e-12) {
      throw DomainError("diagonal state has negative weight " + std::to_string(p) + " on level " +
                        std::to_string(n));
    }
    alpha(n, n) = std::sqrt(std::max(0.0, p));
  }
  return CoefficientMatrix(alpha);
}

}  // namespace qphase
