#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qphase/linalg.hpp"

namespace qphase {

/// Orthonormal Hermitian generators of SU(d), Tr[T_a T_b] = delta_ab.
///
/// Ordering: the d-1 diagonal (Cartan) generators H_1..H_{d-1} come first,
/// followed by the d^2-d off-diagonal generators P, emitted per level pair
/// (j<k) as the symmetric then the antisymmetric combination. For d = 2
/// this gives (sigma_z, sigma_x, sigma_y)/sqrt(2).
///
/// Diagonal generators use the nested construction
/// diag(1,..,1,-l,0,..)/sqrt(l(l+1)). For d = 3 they are instead
///   H_1 = -diag(1, 1, -2)/sqrt(6),  H_2 = -diag(1, -1, 0)/sqrt(2),
/// the qutrit convention under which the purity profile reads
/// x_n = sqrt(2/3) cos(theta + 2 pi (n+1)/3). This differs from the usual
/// lambda_3, lambda_8 by order and an overall sign.
class GeneratorBasis {
 public:
  explicit GeneratorBasis(int d);

  int dim() const { return d_; }
  int size() const { return static_cast<int>(generators_.size()); }
  int cartan_size() const { return d_ - 1; }

  const CMatrix& operator[](int a) const { return generators_[a]; }
  std::span<const CMatrix> all() const { return generators_; }
  std::span<const CMatrix> cartan() const { return std::span(generators_).first(d_ - 1); }
  std::span<const CMatrix> nondiag() const { return std::span(generators_).subspan(d_ - 1); }

  /// Real coefficients v_a = Re Tr[T_a X]; exact expansion for traceless Hermitian X.
  RVector coordinates(const CMatrix& X) const;
  /// Sum_a v_a T_a.
  CMatrix combine(const RVector& v) const;

  /// Gram matrix Tr[T_a T_b] (complex, should be the identity).
  CMatrix gram() const;

 private:
  int d_;
  std::vector<CMatrix> generators_;
};

GeneratorBasis make_generators(int d);

/// Angles of a diagonal SU(d) element, stored as per-level phases chi_n
/// with sum_n chi_n = 0. Cartan coordinates h relate by chi_n = <n|h.H|n>.
class CartanAngles {
 public:
  /// Accepts per-level phases whose sum vanishes up to rounding; the residual
  /// mean is removed so the stored sum is zero.
  static CartanAngles from_levels(const RVector& chi);
  static CartanAngles from_coordinates(const GeneratorBasis& basis, const RVector& h);
  static CartanAngles zero(int d);

  int dim() const { return static_cast<int>(levels_.size()); }
  const RVector& levels() const { return levels_; }
  RVector coordinates(const GeneratorBasis& basis) const;

 private:
  explicit CartanAngles(RVector chi) : levels_(std::move(chi)) {}
  RVector levels_;
};

/// exp(i h.H) = diag(e^{i chi_n}).
CMatrix cartan_exponential(const GeneratorBasis& basis, const CartanAngles& angles);

/// Per-level phases recovered (mod 2 pi, principal branch) from a diagonal unitary.
RVector diagonal_log(const CMatrix& diagonal_unitary);

/// u with U^dagger U_dot = i u.T. Rejects non-unitary or non-special U and a
/// derivative whose generator keeps a trace (an un-removed global phase).
RVector velocity_vector(const GeneratorBasis& basis, const CMatrix& U, const CMatrix& U_dot,
                        const Tolerances& tol = {});

/// Divides a unitary by a d-th root of its determinant. Along a path the
/// root branch is chosen closest to the previous one, so the projection is
/// continuous in t.
class SpecialProjector {
 public:
  struct Result {
    CMatrix special;
    Complex root;  // det(U)^{1/d} actually divided out
  };
  Result project(const CMatrix& U);
  /// Projects a path sample and its derivative: with U = r * Ubar,
  /// Ubar_dot = (U_dot - r_dot Ubar)/r where r_dot/r = Tr[U^dagger U_dot]/d.
  std::pair<CMatrix, CMatrix> project_with_derivative(const CMatrix& U, const CMatrix& U_dot);
  void reset() { previous_.reset(); }

 private:
  std::optional<Complex> previous_;
};

/// Parts of u for a factorized path Ubar = V exp(i h.H):
///   u = v_perp_rot + v_par + h_dot
/// with v_par, h_dot confined to the Cartan block and v_perp_rot to the
/// off-diagonal block.
struct VelocityDecomposition {
  RVector u;
  RVector v_perp;      // off-diagonal part of the coset velocity, unrotated
  RVector v_perp_rot;  // same after conjugation by exp(i h.H)
  RVector v_par;       // Cartan part of the coset velocity
  RVector h_dot;       // Cartan-angle rate, u_cartan - v_par

  /// | u - (v_perp_rot + v_par + h_dot) |
  double residual() const;
};

/// `v_from_coset` are the coordinates of -i V^dagger V_dot at the same instant.
VelocityDecomposition decompose_velocity(const GeneratorBasis& basis, const RVector& u,
                                         const CartanAngles& angles, const RVector& v_from_coset);

/// Coordinates of exp(-i h.H) (v.T) exp(i h.H).
RVector adjoint_rotate(const GeneratorBasis& basis, const CartanAngles& angles, const RVector& v);

}  // namespace qphase
