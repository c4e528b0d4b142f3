#pragma once

#include <utility>
#include <vector>

#include "qphase/linalg.hpp"
#include "qphase/sud_algebra.hpp"

namespace qphase {

/// Single-qudit density matrix rho = 1/d + q sqrt((d-1)/d) q_hat.T.
struct QuditDensity {
  int d = 0;
  CMatrix rho;
  double q = 0.0;
  RVector q_hat;  // unit vector in R^{d^2-1}; zero when q == 0

  double purity() const { return (rho * rho).trace().real(); }
};

/// Throws DomainError naming the most negative eigenvalue when the
/// combination lies outside the physical domain.
QuditDensity density_from_purity(const GeneratorBasis& basis, double q, const RVector& q_hat,
                                 const Tolerances& tol = {});

/// Recovers (q, q_hat) from a density matrix; q from Tr[rho^2] = q^2 + (1-q^2)/d.
QuditDensity density_from_matrix(const GeneratorBasis& basis, const CMatrix& rho,
                                 const Tolerances& tol = {});

/// x_n = <n| q_hat.H |n>, with sum x_n = 0 and sum x_n^2 = 1.
struct DiagonalProfile {
  RVector x;

  static DiagonalProfile from_direction(const GeneratorBasis& basis, const RVector& q_hat_cartan);
  /// Direction (cos theta, sin theta) in the first two Cartan generators
  /// (only cos theta for d = 2).
  static DiagonalProfile from_angle(const GeneratorBasis& basis, double theta);
  /// x recovered from a diagonal Q^2 = 1/d + w diag(x); requires w > 0.
  static DiagonalProfile from_weights(const RVector& diagonal, double w);
  /// Throws DomainError if the sum rules fail.
  void validate(double tol = 1e-12) const;
};

/// Half-width of the physical theta window for a diagonal qutrit density
/// of purity q: pi/3 for q <= 1/2, arccos(-1/(2q)) - 2pi/3 above.
double qutrit_theta_bound(double q);

/// Two-qudit pure state as a d_A x d_B amplitude matrix, d_A <= d_B.
class CoefficientMatrix {
 public:
  /// Requires d_A <= d_B and Tr[alpha^dagger alpha] = 1 within `norm_tol`.
  explicit CoefficientMatrix(CMatrix alpha, double norm_tol = 1e-10);
  static CoefficientMatrix normalized(CMatrix alpha);

  int d_A() const { return static_cast<int>(alpha_.rows()); }
  int d_B() const { return static_cast<int>(alpha_.cols()); }
  const CMatrix& matrix() const { return alpha_; }
  /// <this|other> = Tr[this^dagger other]
  Complex overlap(const CoefficientMatrix& other) const;

 private:
  CMatrix alpha_;
};

/// alpha = e^{i phi} S_A K S_B^T with K = [Q 0].
///
/// Gauge: singular values non-increasing; inside a degenerate block (and
/// for the null spaces) the singular vectors are the Gram-Schmidt images of
/// the standard basis vectors taken in order; each left singular vector's
/// first nonzero component is made real positive before the determinant
/// phases are moved out. det S_A = 1 is reached by a scalar rephasing of
/// S_A; det S_B = 1 by rephasing the last null column of S_B when
/// d_B > d_A, else by a scalar rephasing. Both scalar phases go into phi.
struct SchmidtForm {
  double phi = 0.0;
  CMatrix S_A;
  CMatrix S_B;
  RVector Q;  // diagonal of Q, non-increasing

  CMatrix K(int d_B) const;
  CMatrix reconstruct() const;
};

SchmidtForm schmidt_decompose(const CoefficientMatrix& alpha);

/// rho_A = alpha alpha^dagger, rho_B = (alpha^dagger alpha)^T.
std::pair<CMatrix, CMatrix> reduced_densities(const CoefficientMatrix& alpha);

struct EntanglementReport {
  int d_A = 0;
  int d_B = 0;
  double C = 0.0;    // I-concurrence sqrt(2(1 - Tr rho_A^2))
  double C_m = 0.0;  // sqrt(2(d_A-1)/d_A)
  double q_A = 0.0;
  double q_B = 0.0;
  std::vector<double> traces;  // Tr[Q^{2p}], p = 1..d_A
  double D = 0.0;              // |det Q|

  /// sqrt((C_m^2 - C^2)/2), the weight of qudit A's connection term.
  double weight_A() const;
  /// sqrt((C_m^2 - C^2)/2 + (d_B - d_A)/(d_A d_B)).
  double weight_B() const;
};

EntanglementReport entanglement_report(const CoefficientMatrix& alpha);

/// U_A alpha U_B^T.
CoefficientMatrix apply_local(const CoefficientMatrix& alpha, const CMatrix& U_A,
                              const CMatrix& U_B, const Tolerances& tol = {});

/// Diagonal amplitudes sqrt(1/d + w x_n) on |nn>.
CoefficientMatrix diagonal_state(const RVector& x, double weight);

}  // namespace qphase
