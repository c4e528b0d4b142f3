#include "qphase/closed_form.hpp"

#include <cmath>
#include <string>

namespace qphase {

namespace {

ClosedFormResult from_trace(Complex z, double linear_term) {
  if (std::abs(z) < 1e-300) throw DomainError("closed form: phase undefined where the trace vanishes");
  ClosedFormResult r;
  r.phi_total_bar = std::arg(z);
  if (r.phi_total_bar <= -kPi) r.phi_total_bar += kTwoPi;
  r.phi_g = r.phi_total_bar - linear_term;
  return r;
}

void check_traceless(const RVector& chi, const char* what) {
  const double scale = std::max(1.0, chi.cwiseAbs().maxCoeff());
  if (std::abs(chi.sum()) > 1e-9 * scale) {
    throw DomainError(std::string(what) + " must sum to zero (sum = " + std::to_string(chi.sum()) + ")");
  }
}

void check_qutrit_theta(double q, double theta) {
  if (q < 0.0 || q > 1.0) throw DomainError("purity q must lie in [0, 1]");
  const double bound = qutrit_theta_bound(q);
  if (std::abs(theta) > bound + 1e-12) {
    throw DomainError("theta = " + std::to_string(theta) + " outside the physical window |theta| <= " +
                      std::to_string(bound) + " for q = " + std::to_string(q));
  }
}

void check_concurrence(double C, double C_max) {
  if (C < -1e-12 || C > C_max + 1e-12) {
    throw DomainError("concurrence " + std::to_string(C) + " outside [0, " + std::to_string(C_max) + "]");
  }
}

// sqrt((C_max^2 - C^2)/2). A C that equals C_max up to rounding is maximally
// entangled; without the snap the square root would turn 1e-16 into 1e-8.
double entangled_weight(double C, double C_max) {
  const double gap = C_max * C_max - C * C;
  return gap < 1e-13 * C_max * C_max ? 0.0 : std::sqrt(gap / 2.0);
}

ClosedFormResult qutrit_form(double q, double theta, double c0, double c1) {
  const double c2 = -(c0 + c1);
  const double w0 = std::cos(theta + 2.0 * kPi / 3.0);
  const double w1 = std::cos(theta + 4.0 * kPi / 3.0);
  const double w2 = std::cos(theta);
  const Complex z = std::polar(1.0 / 3.0 + 2.0 * q / 3.0 * w0, c0) +
                    std::polar(1.0 / 3.0 + 2.0 * q / 3.0 * w1, c1) +
                    std::polar(1.0 / 3.0 + 2.0 * q / 3.0 * w2, c2);
  return from_trace(z, 2.0 * q / 3.0 * (c0 * w0 + c1 * w1 + c2 * w2));
}

ClosedFormResult diagonal_form(int d, double weight, const DiagonalProfile& x, const RVector& chi) {
  if (x.x.size() != d || chi.size() != d) {
    throw DimensionError("profile and phases must both have " + std::to_string(d) + " entries");
  }
  x.validate(1e-9);
  Complex z = 0.0;
  for (int n = 0; n < d; ++n) z += std::polar(1.0 / d + weight * x.x(n), chi(n));
  return from_trace(z, weight * x.x.dot(chi));
}

}  // namespace

ClosedFormResult ClosedFormResult::aligned(double reference) const {
  ClosedFormResult r = *this;
  const int k = static_cast<int>(std::lround((reference - total()) / kTwoPi));
  r.winding += k;
  r.phi_g += kTwoPi * k;
  return r;
}

double phase_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

ClosedFormResult single_qudit_diagonal(int d, double q, const DiagonalProfile& x,
                                       const RVector& chi) {
  if (d < 2) throw DomainError("single_qudit_diagonal needs d >= 2");
  if (q < 0.0 || q > 1.0) throw DomainError("purity q must lie in [0, 1]");
  check_traceless(chi, "per-level phases");
  return diagonal_form(d, q * std::sqrt((d - 1.0) / d), x, chi);
}

ClosedFormResult single_qubit_partial(double q, double chi, double Omega) {
  const Complex z(std::cos(chi), q * std::sin(chi));
  return from_trace(z, q * (chi + Omega / 2.0));
}

ClosedFormResult single_qutrit_diagonal(double q, double theta, double chi0, double chi1) {
  check_qutrit_theta(q, theta);
  return qutrit_form(q, theta, chi0, chi1);
}

ClosedFormResult two_qubit_partial(double C, double chiA, double chiB, double OmegaA,
                                   double OmegaB) {
  check_concurrence(C, 1.0);
  const double s = std::sqrt(2.0) * entangled_weight(C, 1.0);
  const double chiT = chiA + chiB;
  const Complex z(std::cos(chiT), s * std::sin(chiT));
  return from_trace(z, s * (chiT + (OmegaA + OmegaB) / 2.0));
}

double two_qubit_cyclic(double C, int n, double OmegaA, double OmegaB) {
  check_concurrence(C, 1.0);
  return n * kPi - std::sqrt(2.0) * entangled_weight(C, 1.0) * (OmegaA + OmegaB) / 2.0;
}

ClosedFormResult two_qudit_diagonal(int d, double C, const DiagonalProfile& x,
                                    const RVector& chiT) {
  if (d < 2) throw DomainError("two_qudit_diagonal needs d >= 2");
  const double Cm = std::sqrt(2.0 * (d - 1.0) / d);
  check_concurrence(C, Cm);
  check_traceless(chiT, "total per-level phases");
  return diagonal_form(d, entangled_weight(C, Cm), x, chiT);
}

ClosedFormResult two_qutrit_example(double q, double theta, double chiT0, double chiT1) {
  check_qutrit_theta(q, theta);
  return qutrit_form(q, theta, chiT0, chiT1);
}

ClosedFormResult qubit_qutrit_effective(double C, double chiA, double chiB0, double chiB1) {
  // The overlap carries an extra common phase (chi_B0 + chi_B1)/2 that the
  // dynamical phase cancels; keep it in the total so it matches arg <psi(0)|psi(t)>.
  const double common = (chiB0 + chiB1) / 2.0;
  const ClosedFormResult q = two_qubit_partial(C, chiA, (chiB0 - chiB1) / 2.0, 0.0, 0.0);
  ClosedFormResult r;
  r.phi_total_bar = wrap_angle(q.phi_total_bar + common);
  r.phi_g = q.phi_g + (r.phi_total_bar - q.phi_total_bar - common);
  return r;
}

ClosedFormResult qubit_qutrit_dual(double chiA, double chiB0, double chiB1, double chiB2) {
  RVector chiB(3);
  chiB << chiB0, chiB1, chiB2;
  check_traceless(chiB, "qutrit phases");
  const Complex z = 0.5 * std::cos(chiA - chiB2 - chiB1 / 2.0) * std::polar(1.0, -chiB1 / 2.0) +
                    0.5 * std::cos(chiA - chiB1 - chiB2 / 2.0) * std::polar(1.0, -chiB2 / 2.0);
  return from_trace(z, chiB0 / 4.0);
}

}  // namespace qphase
