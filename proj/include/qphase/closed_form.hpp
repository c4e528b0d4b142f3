#pragma once

#include "qphase/linalg.hpp"
#include "qphase/state_model.hpp"

namespace qphase {

/// Closed-form phases. phi_total_bar is the principal arg of the underlying
/// trace; phi_g is built on the branch phi_total_bar + 2 pi winding.
struct ClosedFormResult {
  double phi_total_bar = 0.0;  // (-pi, pi]
  int winding = 0;
  double phi_g = 0.0;

  double total() const { return phi_total_bar + kTwoPi * winding; }
  /// Same result with the winding chosen so total() is nearest `reference`
  /// (e.g. an unwrapped engine total phase); phi_g moves with it.
  ClosedFormResult aligned(double reference) const;
};

/// |a - b| reduced mod 2 pi, in [0, pi].
double phase_distance(double a, double b);

/// Diagonal single qudit: weights 1/d + q sqrt((d-1)/d) x_n on e^{i chi_n}.
ClosedFormResult single_qudit_diagonal(int d, double q, const DiagonalProfile& x,
                                       const RVector& chi);

/// Single qubit with rho0 = (1 + q sigma_z)/2, diagonal angle chi and solid
/// angle Omega swept by the coset factor (closed at the evaluation time).
ClosedFormResult single_qubit_partial(double q, double chi, double Omega);

/// Qutrit with x_n = sqrt(2/3) cos(theta + 2 pi (n+1)/3), chi_2 = -(chi_0 + chi_1).
ClosedFormResult single_qutrit_diagonal(double q, double theta, double chi0, double chi1);

/// Two qubits of concurrence C, diagonal angles chi_A, chi_B and solid angles.
ClosedFormResult two_qubit_partial(double C, double chiA, double chiB, double OmegaA,
                                   double OmegaB);

/// Cyclic two-qubit evolution: n pi - sqrt(1 - C^2) (Omega_A + Omega_B)/2.
/// Omega_j is the full loop connection sqrt2 oint q_hat.u dt, i.e. the Bloch
/// solid angle plus 2 chi_j(T); the two agree only when chi_j(T) = 0.
double two_qubit_cyclic(double C, int n, double OmegaA, double OmegaB);

/// Equal-dimension diagonal state sqrt(1/d + w x_n)|nn>, w = sqrt((C_m^2 - C^2)/2),
/// with per-level totals chi_T = chi_A + chi_B.
ClosedFormResult two_qudit_diagonal(int d, double C, const DiagonalProfile& x,
                                    const RVector& chiT);

/// Two qutrits, same weights as single_qutrit_diagonal on the totals chi_T.
ClosedFormResult two_qutrit_example(double q, double theta, double chiT0, double chiT1);

/// Qubit-qutrit diagonal state: the qutrit acts as a qubit with
/// chi_B = (chi_B0 - chi_B1)/2.
ClosedFormResult qubit_qutrit_effective(double C, double chiA, double chiB0, double chiB1);

/// Qubit-qutrit state alpha = [[1/sqrt2, 0, 0], [0, 1/2, 1/2]] under
/// diag(e^{i chi_A}, e^{-i chi_A}) x diag(e^{i chi_Bn}).
ClosedFormResult qubit_qutrit_dual(double chiA, double chiB0, double chiB1, double chiB2);

}  // namespace qphase
