#include <catch2/catch_amalgamated.hpp>

#include "qphase/closed_form.hpp"
#include "qphase/phase_engine.hpp"
#include "qphase/scenario.hpp"
#include "support.hpp"

using namespace qphase;
using Catch::Approx;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

// Phasor sum written out independently of the library.
Complex phasors(const RVector& weights, const RVector& chi) {
  Complex z = 0.0;
  for (Eigen::Index n = 0; n < chi.size(); ++n) z += weights(n) * std::exp(Complex(0.0, chi(n)));
  return z;
}

}  // namespace

TEST_CASE("single qudit phasor sums") {
  const GeneratorBasis b3(3);
  const auto x = DiagonalProfile::from_angle(b3, 0.0);
  // Completely mixed qutrit, chi = 2pi/3 (1, 1, -2): all phasors aligned.
  const auto r = single_qudit_diagonal(3, 0.0, x, kTwoPi / 3.0 * vec({1, 1, -2}));
  CHECK(r.phi_total_bar == Approx(kTwoPi / 3.0).margin(1e-14));
  CHECK(r.phi_g == Approx(kTwoPi / 3.0).margin(1e-14));

  const auto zero = single_qudit_diagonal(3, 0.7, x, RVector::Zero(3));
  CHECK(zero.phi_total_bar == 0.0);
  CHECK(zero.phi_g == 0.0);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int d = 2; d <= 6; ++d) {
    const GeneratorBasis b(d);
    const auto xd = DiagonalProfile::from_angle(b, d == 2 ? 0.0 : 0.3);
    for (int k = 0; k < 20; ++k) {
      RVector chi(d);
      for (int n = 0; n < d; ++n) chi(n) = u(rng);
      chi.array() -= chi.mean();
      const double q = (k % 5) / 5.0;
      const double w = q * std::sqrt((d - 1.0) / d);
      const RVector weights = RVector::Constant(d, 1.0 / d) + w * xd.x;
      if (weights.minCoeff() < 0.0) continue;
      const auto res = single_qudit_diagonal(d, q, xd, chi);
      CHECK(phase_distance(res.phi_total_bar, std::arg(phasors(weights, chi))) < 1e-13);
      CHECK(res.phi_g == Approx(res.phi_total_bar - w * xd.x.dot(chi)).margin(1e-13));
    }
  }
}

TEST_CASE("single qubit partial form") {
  CHECK(single_qubit_partial(0.5, kPi / 3.0, 0.0).phi_g == Approx(0.19012560334646667).margin(1e-14));
  // Pure states: the solid-angle expression.
  for (double Om : {0.3, 1.0, kPi, 5.0}) {
    CHECK(single_qubit_partial(1.0, 0.0, Om).phi_g == Approx(-Om / 2.0).margin(1e-14));
  }
  // Completely mixed: only 0 or pi.
  for (double chi = -3.0; chi < 3.0; chi += 0.37) {
    const double g = single_qubit_partial(0.0, chi, 1.2).phi_g;
    CHECK(std::min(phase_distance(g, 0.0), phase_distance(g, kPi)) < 1e-14);
  }
  // The general qudit form reduces to the qubit one for d = 2.
  const GeneratorBasis b2(2);
  const auto x = DiagonalProfile::from_angle(b2, 0.0);
  for (double q : {0.0, 0.3, 0.8, 1.0}) {
    for (double chi : {-2.0, -0.4, 0.2, 1.1, 2.9}) {
      const auto a = single_qudit_diagonal(2, q, x, vec({chi, -chi}));
      const auto b = single_qubit_partial(q, chi, 0.0);
      CHECK(phase_distance(a.phi_total_bar, b.phi_total_bar) < 1e-14);
      CHECK(a.phi_g == Approx(b.phi_g).margin(1e-13));
    }
  }
}

TEST_CASE("single qutrit form") {
  CHECK(single_qutrit_diagonal(0.0, 0.0, kTwoPi / 3.0, kTwoPi / 3.0).phi_g ==
        Approx(kTwoPi / 3.0).margin(1e-14));
  CHECK(single_qutrit_diagonal(0.6, 0.2, 0.0, 0.0).phi_g == 0.0);
  // q = 1, theta = 0: only level 2 is populated.
  const auto r = single_qutrit_diagonal(1.0, 0.0, 0.1, 0.2);
  CHECK(r.phi_total_bar == Approx(-0.3).margin(1e-14));
  CHECK(std::abs(r.phi_g) < 1e-14);
  CHECK_THROWS_AS(single_qutrit_diagonal(1.0, 0.5, 0.1, 0.2), DomainError);

  // Agrees with the basis-driven qudit form built from the same profile.
  const GeneratorBasis b3(3);
  for (double theta : {-0.3, 0.0, 0.4}) {
    const auto x = DiagonalProfile::from_angle(b3, theta);
    for (double q : {0.2, 0.5}) {
      const auto a = single_qutrit_diagonal(q, theta, 0.7, -1.9);
      const auto b = single_qudit_diagonal(3, q, x, vec({0.7, -1.9, 1.2}));
      CHECK(phase_distance(a.phi_total_bar, b.phi_total_bar) < 1e-13);
      CHECK(a.phi_g == Approx(b.phi_g).margin(1e-13));
    }
  }
}

TEST_CASE("two qubit forms") {
  CHECK(two_qubit_partial(0.6, kPi / 8.0, kPi / 8.0, 0.0, 0.0).phi_g ==
        Approx(0.0464224115055941).margin(1e-13));
  // Only chi_A + chi_B matters.
  CHECK(two_qubit_partial(0.6, kPi / 4.0, 0.0, 0.0, 0.0).phi_g ==
        Approx(two_qubit_partial(0.6, 0.0, kPi / 4.0, 0.0, 0.0).phi_g).margin(1e-15));
  for (double chiT = -3.0; chiT < 3.0; chiT += 0.41) {
    const double g = two_qubit_partial(1.0, chiT, 0.0, 0.7, 0.2).phi_g;
    CHECK(std::min(phase_distance(g, 0.0), phase_distance(g, kPi)) < 1e-14);
    if (std::abs(chiT) < kPi / 2.0) {
      CHECK(two_qubit_partial(0.0, chiT, 0.0, 0.7, 0.2).phi_g == Approx(-0.45).margin(1e-14));
    }
  }
  CHECK(two_qubit_cyclic(1.0, 3, 1.0, 2.0) == Approx(3.0 * kPi));
  CHECK(two_qubit_cyclic(0.0, 0, kTwoPi, 0.0) == Approx(-kPi));
  CHECK(two_qubit_cyclic(0.6, 1, kPi, kPi) == Approx(0.2 * kPi));
}

TEST_CASE("two qudit diagonal forms") {
  const GeneratorBasis b3(3);
  const auto x = DiagonalProfile::from_angle(b3, 0.0);
  const double Cm = std::sqrt(4.0 / 3.0);
  const auto r = two_qudit_diagonal(3, Cm, x, kTwoPi / 3.0 * vec({1, 1, -2}));
  CHECK(r.phi_g == Approx(kTwoPi / 3.0).margin(1e-14));
  CHECK(r.phi_g == r.phi_total_bar);

  // Identical to the single qudit with q = sqrt(1 - C^2/C_m^2).
  for (int d = 2; d <= 5; ++d) {
    const GeneratorBasis b(d);
    const auto xd = DiagonalProfile::from_angle(b, 0.0);
    const double Cmd = std::sqrt(2.0 * (d - 1.0) / d);
    RVector chi = RVector::LinSpaced(d, -1.0, 1.7);
    chi.array() -= chi.mean();
    for (double q : {0.0, 0.4, 0.9}) {
      const double C = Cmd * std::sqrt(1.0 - q * q);
      const auto two = two_qudit_diagonal(d, C, xd, chi);
      const auto one = single_qudit_diagonal(d, q, xd, chi);
      CHECK(phase_distance(two.phi_total_bar, one.phi_total_bar) < 1e-13);
      CHECK(two.phi_g == Approx(one.phi_g).margin(1e-12));
    }
  }
  CHECK_THROWS_AS(two_qudit_diagonal(3, 1.2, x, vec({1, 0, 0})), DomainError);

  for (double theta : {-0.2, 0.0, 0.5}) {
    const auto a = two_qutrit_example(0.3, theta, 1.1, -0.4);
    const auto b = single_qutrit_diagonal(0.3, theta, 1.1, -0.4);
    CHECK(a.phi_total_bar == b.phi_total_bar);
    CHECK(a.phi_g == b.phi_g);
  }
  const auto mix = two_qutrit_example(0.0, 0.0, 0.8, 0.3);
  CHECK(mix.phi_g == mix.phi_total_bar);
}

TEST_CASE("qubit-qutrit forms") {
  const auto e = qubit_qutrit_effective(0.8, kPi / 6.0, kPi / 3.0, 0.0);
  const auto q = two_qubit_partial(0.8, kPi / 6.0, kPi / 6.0, 0.0, 0.0);
  CHECK(e.phi_g == Approx(q.phi_g).margin(1e-14));
  // The total carries the common qutrit phase (chi_B0 + chi_B1)/2.
  CHECK(phase_distance(e.phi_total_bar, q.phi_total_bar + kPi / 6.0) < 1e-14);

  // Oracle: overlap of diag(a, b) on |00>, |11> under the local phases.
  const double s = 0.6;  // sqrt(1 - C^2)
  const double p0 = (1 + s) / 2, p1 = (1 - s) / 2;
  for (double chiA : {-1.0, 0.3}) {
    for (double b0 : {0.2, 1.4}) {
      const double b1 = -0.5;
      const Complex z = p0 * std::exp(Complex(0, chiA + b0)) + p1 * std::exp(Complex(0, -chiA + b1));
      CHECK(phase_distance(qubit_qutrit_effective(0.8, chiA, b0, b1).phi_total_bar, std::arg(z)) < 1e-14);
    }
  }

  // Dual state: Tr[alpha^dagger U_A alpha U_B^T] written out.
  const CMatrix a = named_state("psiqubitqutrit2", 0.0, 0.0);
  for (double chiA : {0.0, 0.5, 2.0}) {
    const double b0 = 0.4, b1 = -1.3, b2 = -(b0 + b1);
    const CMatrix UA = vec({chiA, -chiA}).unaryExpr([](double c) { return std::exp(Complex(0, c)); }).asDiagonal();
    const CMatrix UB = vec({b0, b1, b2}).unaryExpr([](double c) { return std::exp(Complex(0, c)); }).asDiagonal();
    const Complex z = (a.adjoint() * UA * a * UB.transpose()).trace();
    const auto r = qubit_qutrit_dual(chiA, b0, b1, b2);
    CHECK(phase_distance(r.phi_total_bar, std::arg(z)) < 1e-14);
    CHECK(r.phi_g == Approx(r.phi_total_bar - b0 / 4.0).margin(1e-14));
  }
}

TEST_CASE("closed forms are 2 pi periodic in the total phase") {
  const GeneratorBasis b3(3);
  const auto x = DiagonalProfile::from_angle(b3, 0.2);
  const RVector chi = vec({0.4, -1.0, 0.6});
  const RVector shift = kTwoPi * vec({1, -1, 0});
  const auto a = single_qudit_diagonal(3, 0.5, x, chi);
  const auto b = single_qudit_diagonal(3, 0.5, x, chi + shift);
  CHECK(phase_distance(a.phi_total_bar, b.phi_total_bar) < 1e-13);
  const auto al = b.aligned(a.total() + 5.0 * kTwoPi);
  CHECK(al.total() - a.total() == Approx(5.0 * kTwoPi));
  CHECK(al.phi_g - b.phi_g == Approx(al.total() - b.total()));
}

TEST_CASE("engine matches the two-qubit form across C and chi") {
  for (double q : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const CoefficientMatrix a(named_state("psi2qubit", q, 0.0));
    const double C = entanglement_report(a).C;
    // chi_A = 0.7 t, chi_B = -0.3 t over [0, 2 pi]: chi_T sweeps 0.4 t.
    const PairEvolution p{LocalEvolution(2, {CartanLinear{vec({0.7, -0.7}), kTwoPi}}),
                          LocalEvolution(2, {CartanLinear{vec({-0.3, 0.3}), kTwoPi}}),
                          TimeGrid{kTwoPi, 2400}};
    const auto tr = run_trace(a, p);
    for (int j = 0; j <= 24; ++j) {
      const std::size_t k = static_cast<std::size_t>(j * 100);
      if (tr.indeterminate[k] || tr.magnitude[k] < 1e-6) continue;
      const double t = tr.t[k];
      INFO("q " << q << " k " << k << " mag " << tr.magnitude[k]);
      const auto cf = two_qubit_partial(C, 0.7 * t, -0.3 * t, 0.0, 0.0).aligned(tr.total_phase[k]);
      CHECK(std::abs(cf.total() - tr.total_phase[k]) < 1e-10);
      CHECK(phase_distance(cf.phi_g, tr.geometric_phase[k]) < 1e-8);
    }
  }
}

TEST_CASE("engine matches the diagonal qudit form for d = 4") {
  const GeneratorBasis b4(4);
  const auto x = DiagonalProfile::from_angle(b4, 0.7);
  const double Cm = std::sqrt(1.5);
  for (double q : {0.0, 0.3, 0.5}) {
    const double w = q * std::sqrt(3.0 / 4.0);
    const CoefficientMatrix a = diagonal_state(x.x, w);
    const double C = entanglement_report(a).C;
    CHECK(C == Approx(Cm * std::sqrt(1.0 - q * q)).margin(1e-12));
    const RVector ra = vec({1.0, 0.5, -0.2, -1.3}), rb = vec({-0.4, 0.9, 0.1, -0.6});
    const PairEvolution p{LocalEvolution(4, {CartanLinear{ra, 3.0}}),
                          LocalEvolution(4, {CartanLinear{rb, 3.0}}), TimeGrid{3.0, 3000}};
    const auto tr = run_trace(a, p);
    for (std::size_t k = 0; k < tr.size(); k += 150) {
      if (tr.magnitude[k] < 1e-6) continue;
      const auto cf = two_qudit_diagonal(4, C, x, (ra + rb) * tr.t[k]).aligned(tr.total_phase[k]);
      CHECK(std::abs(cf.total() - tr.total_phase[k]) < 1e-10);
      CHECK(phase_distance(cf.phi_g, tr.geometric_phase[k]) < 1e-8);
    }
  }
}
