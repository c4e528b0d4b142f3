#include "qphase/sud_algebra.hpp"

#include <cmath>
#include <string>

namespace qphase {

namespace {

CMatrix nested_diagonal(int d, int l) {
  // diag(1,...,1,-l,0,...,0)/sqrt(l(l+1)) with l leading ones
  CMatrix H = CMatrix::Zero(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
  for (int n = 0; n < l; ++n) H(n, n) = norm;
  H(l, l) = -l * norm;
  return H;
}

}  // namespace

GeneratorBasis::GeneratorBasis(int d) : d_(d) {
  if (d < 2) {
    throw DomainError("SU(d) generators need d >= 2, got " + std::to_string(d));
  }
  generators_.reserve(static_cast<std::size_t>(d) * d - 1);

  if (d == 3) {
    generators_.push_back(-nested_diagonal(3, 2));
    generators_.push_back(-nested_diagonal(3, 1));
  } else {
    for (int l = 1; l < d; ++l) generators_.push_back(nested_diagonal(d, l));
  }

  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      CMatrix sym = CMatrix::Zero(d, d);
      sym(j, k) = s;
      sym(k, j) = s;
      generators_.push_back(std::move(sym));

      CMatrix anti = CMatrix::Zero(d, d);
      anti(j, k) = -kI * s;
      anti(k, j) = kI * s;
      generators_.push_back(std::move(anti));
    }
  }
}

RVector GeneratorBasis::coordinates(const CMatrix& X) const {
  if (X.rows() != d_ || X.cols() != d_) {
    throw DimensionError("expected " + std::to_string(d_) + "x" + std::to_string(d_) +
                         " matrix, got " + format_shape(X));
  }
  RVector v(size());
  for (int a = 0; a < size(); ++a) {
    // Tr[T_a X] without forming the product
    v(a) = (generators_[a].transpose().cwiseProduct(X)).sum().real();
  }
  return v;
}

CMatrix GeneratorBasis::combine(const RVector& v) const {
  if (v.size() != size()) {
    throw DimensionError("coefficient vector of length " + std::to_string(v.size()) +
                         " for " + std::to_string(size()) + " generators");
  }
  CMatrix out = CMatrix::Zero(d_, d_);
  for (int a = 0; a < size(); ++a) out += v(a) * generators_[a];
  return out;
}

CMatrix GeneratorBasis::gram() const {
  CMatrix g(size(), size());
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) g(a, b) = (generators_[a] * generators_[b]).trace();
  }
  return g;
}

GeneratorBasis make_generators(int d) { return GeneratorBasis(d); }

CartanAngles CartanAngles::from_levels(const RVector& chi) {
  if (chi.size() < 2) throw DomainError("Cartan angles need at least two levels");
  const double sum = chi.sum();
  const double scale = std::max(1.0, chi.cwiseAbs().maxCoeff());
  if (std::abs(sum) > 1e-12 * scale * chi.size()) {
    throw DomainError("per-level phases must sum to zero, sum = " + std::to_string(sum));
  }
  RVector fixed = chi.array() - sum / static_cast<double>(chi.size());
  return CartanAngles(std::move(fixed));
}

CartanAngles CartanAngles::from_coordinates(const GeneratorBasis& basis, const RVector& h) {
  if (h.size() != basis.cartan_size()) {
    throw DimensionError("Cartan coordinates of length " + std::to_string(h.size()) +
                         " for SU(" + std::to_string(basis.dim()) + ")");
  }
  RVector chi = RVector::Zero(basis.dim());
  for (int b = 0; b < basis.cartan_size(); ++b) {
    chi += h(b) * basis[b].diagonal().real();
  }
  return from_levels(chi);
}

CartanAngles CartanAngles::zero(int d) { return CartanAngles(RVector::Zero(d)); }

RVector CartanAngles::coordinates(const GeneratorBasis& basis) const {
  if (dim() != basis.dim()) {
    throw DimensionError("Cartan angles for d=" + std::to_string(dim()) + " against SU(" +
                         std::to_string(basis.dim()) + ")");
  }
  RVector h(basis.cartan_size());
  for (int b = 0; b < basis.cartan_size(); ++b) h(b) = basis[b].diagonal().real().dot(levels_);
  return h;
}

CMatrix cartan_exponential(const GeneratorBasis& basis, const CartanAngles& angles) {
  if (angles.dim() != basis.dim()) {
    throw DimensionError("Cartan angles for d=" + std::to_string(angles.dim()) +
                         " against SU(" + std::to_string(basis.dim()) + ")");
  }
  return diagonal_phases(angles.levels());
}

RVector diagonal_log(const CMatrix& diagonal_unitary) {
  RVector chi(diagonal_unitary.rows());
  for (Eigen::Index n = 0; n < chi.size(); ++n) chi(n) = std::arg(diagonal_unitary(n, n));
  return chi;
}

RVector velocity_vector(const GeneratorBasis& basis, const CMatrix& U, const CMatrix& U_dot,
                        const Tolerances& tol) {
  const int d = basis.dim();
  if (U.rows() != d || U.cols() != d || U_dot.rows() != d || U_dot.cols() != d) {
    throw DimensionError("velocity_vector: expected " + std::to_string(d) + "x" +
                         std::to_string(d) + " path samples");
  }
  const double ures = unitarity_residual(U);
  if (ures > tol.unitarity) {
    throw DomainError("velocity_vector: path sample not unitary (residual " +
                      std::to_string(ures) + ")");
  }
  const Complex det = U.determinant();
  if (std::abs(det - 1.0) > tol.unitarity) {
    throw DomainError("velocity_vector: path sample not special (det deviates by " +
                      std::to_string(std::abs(det - 1.0)) + ")");
  }
  const CMatrix M = U.adjoint() * U_dot;
  const double scale = std::max(1.0, M.norm());
  if (std::abs(M.trace()) > tol.trace * scale) {
    throw DomainError("velocity_vector: Tr[U^dagger U_dot] = " +
                      std::to_string(std::abs(M.trace())) +
                      " is not zero; strip the global phase first");
  }
  const CMatrix G = -kI * M;  // Hermitian when M is anti-Hermitian
  if (!is_hermitian(G, tol.unitarity * scale)) {
    throw DomainError("velocity_vector: U^dagger U_dot is not anti-Hermitian");
  }
  return basis.coordinates(G);
}

SpecialProjector::Result SpecialProjector::project(const CMatrix& U) {
  const auto d = static_cast<double>(U.rows());
  const Complex det = U.determinant();
  if (std::abs(det) < 1e-300) throw DomainError("cannot project a singular matrix onto SU(d)");
  Complex root = std::polar(std::pow(std::abs(det), 1.0 / d), std::arg(det) / d);
  if (previous_) {
    const Complex step = std::polar(1.0, kTwoPi / d);
    Complex best = root;
    Complex candidate = root;
    for (int k = 0; k < static_cast<int>(d); ++k) {
      if (std::abs(candidate - *previous_) < std::abs(best - *previous_)) best = candidate;
      candidate *= step;
    }
    root = best;
  }
  previous_ = root;
  return {U / root, root};
}

std::pair<CMatrix, CMatrix> SpecialProjector::project_with_derivative(const CMatrix& U,
                                                                      const CMatrix& U_dot) {
  const auto [special, root] = project(U);
  const Complex rate = (U.adjoint() * U_dot).trace() / static_cast<double>(U.rows());
  CMatrix special_dot = (U_dot - rate * U) / root;
  return {special, special_dot};
}

double VelocityDecomposition::residual() const {
  return (u - (v_perp_rot + v_par + h_dot)).norm();
}

RVector adjoint_rotate(const GeneratorBasis& basis, const CartanAngles& angles, const RVector& v) {
  const CMatrix E = cartan_exponential(basis, angles);
  return basis.coordinates(E.adjoint() * basis.combine(v) * E);
}

VelocityDecomposition decompose_velocity(const GeneratorBasis& basis, const RVector& u,
                                         const CartanAngles& angles, const RVector& v_from_coset) {
  const int n = basis.size();
  const int c = basis.cartan_size();
  if (u.size() != n || v_from_coset.size() != n) {
    throw DimensionError("decompose_velocity: vectors must have length " + std::to_string(n));
  }
  if (angles.dim() != basis.dim()) {
    throw DimensionError("decompose_velocity: Cartan angles dimension mismatch");
  }
  VelocityDecomposition out;
  out.u = u;
  out.v_par = RVector::Zero(n);
  out.v_par.head(c) = v_from_coset.head(c);
  out.v_perp = RVector::Zero(n);
  out.v_perp.tail(n - c) = v_from_coset.tail(n - c);
  out.v_perp_rot = adjoint_rotate(basis, angles, out.v_perp);
  out.h_dot = RVector::Zero(n);
  out.h_dot.head(c) = u.head(c) - out.v_par.head(c);
  return out;
}

}  // namespace qphase
