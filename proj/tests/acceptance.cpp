// Acceptance checks: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "qphase/closed_form.hpp"
#include "qphase/phase_engine.hpp"
#include "qphase/scenario.hpp"
#include "support.hpp"

using namespace qphase;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Cycles of a diagonal run checked against the lattice of its dimensions.
// Returns the worst distance; counts the non-continuum events.
double lattice_worst(const CoefficientMatrix& a, const PairEvolution& p, int& events) {
  const auto tr = run_trace(a, p);
  const auto lat = fractional_lattice(a.d_A(), a.d_B());
  double worst = 0.0;
  for (const auto& e : detect_cycles(tr, a, p)) {
    if (e.continuum) continue;
    ++events;
    worst = std::max(worst, lat.distance(e.phase));
  }
  return worst;
}

PairEvolution cartan_pair(int dA, const RVector& ra, int dB, const RVector& rb, double T, int steps) {
  return {LocalEvolution(dA, {CartanLinear{ra, T}}), LocalEvolution(dB, {CartanLinear{rb, T}}),
          TimeGrid{T, steps}};
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  auto check = [&](const std::string& label, const CoefficientMatrix& a, const PairEvolution& p) {
    int events = 0;
    const double w = lattice_worst(a, p, events);
    o.require(events > 0, label + ": no cycles detected");
    o.require(w <= 1e-6, label + ": cycle off the lattice by " + std::to_string(w));
    worst = std::max(worst, w);
  };
  const double T = 2.0 * kTwoPi;
  check("(2,2)", CoefficientMatrix(named_state("psi2qubit", 0.0, 0.0)),
        cartan_pair(2, vec({1, -1}), 2, vec({0.5, -0.5}), T, 4000));
  check("(3,3)", CoefficientMatrix(named_state("2qutritstate", 0.0, 0.0)),
        cartan_pair(3, vec({1, 1, -2}), 3, vec({0.5, -1, 0.5}), T, 4000));
  check("(4,4)", CoefficientMatrix(CMatrix::Identity(4, 4) / 2.0),
        cartan_pair(4, vec({1, 1, 1, -3}), 4, vec({0.5, 0.5, -0.5, -0.5}), T, 4000));
  for (const char* name : {"fig4a", "fig4b", "fig4c", "fig4d"}) {
    const ScenarioConfig c = make_preset(name);
    const PreparedScenario prep = prepare(c);
    check(std::string("(2,3) ") + name, prep.alpha, prep.pair);
  }
  // (3,4): rho_A = 1/3, the largest entanglement available to the pair.
  CMatrix a34 = CMatrix::Zero(3, 4);
  a34(0, 0) = a34(1, 1) = 1.0 / std::sqrt(3.0);
  a34(2, 2) = a34(2, 3) = 1.0 / std::sqrt(6.0);
  const CoefficientMatrix alpha34(a34);
  check("(3,4) B", alpha34,
        {LocalEvolution::identity(3, T), LocalEvolution(4, {CartanLinear{vec({1, 1, 1, -3}), T}}),
         TimeGrid{T, 4000}});
  check("(3,4) A", alpha34,
        {LocalEvolution(3, {CartanLinear{vec({1, 1, -2}), T}}), LocalEvolution::identity(4, T),
         TimeGrid{T, 4000}});
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail << "max lattice distance " << worst << ", " << elapsed << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  const RunResult r = run_scenario(make_preset("fig1a"));
  const PhaseTrace& tr = r.trace;
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = tr.t[k];
    const Complex oracle = (2.0 * std::exp(Complex(0, t)) + std::exp(Complex(0, -2.0 * t))) / 3.0;
    worst = std::max(worst, std::abs(tr.overlap[k] - oracle));
  }
  o.require(worst <= 1e-10, "overlap oracle deviation " + std::to_string(worst));

  const double expected_phase[] = {kTwoPi / 3.0, 2.0 * kTwoPi / 3.0, 0.0};
  std::vector<CyclicEvent> cycles;
  for (const auto& e : r.cycles) {
    if (!e.continuum && e.t_cycle > 1e-9) cycles.push_back(e);
  }
  o.require(cycles.size() == 3, "expected 3 cycles, found " + std::to_string(cycles.size()));
  for (int k = 1; k <= 3 && cycles.size() == 3; ++k) {
    const double tk = kTwoPi * k / 3.0;
    const auto& e = cycles[k - 1];
    o.require(std::abs(e.t_cycle - tk) < 1e-6, "cycle time " + std::to_string(e.t_cycle));
    o.require(e.magnitude >= 1.0 - 1e-9, "cycle magnitude " + std::to_string(e.magnitude));
    o.require(phase_distance(e.phase, expected_phase[k - 1]) < 1e-6, "cycle phase " + std::to_string(e.phase));
  }
  // Away from the cusps the overlap stays inside the unit disk.
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double frac = tr.t[k] / (kTwoPi / 3.0);
    if (std::abs(frac - std::round(frac)) > 0.01) {
      o.require(tr.magnitude[k] < 1.0 - 1e-9, "unexpected unit-circle contact at t = " + std::to_string(tr.t[k]));
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail << "oracle deviation " << worst << ", " << elapsed << " s";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const RunResult r = run_scenario(make_preset("fig1d"));
  double worst = 0.0;
  for (double m : r.trace.magnitude) worst = std::max(worst, std::abs(m - 1.0));
  o.require(worst <= 1e-9, "max ||overlap| - 1| = " + std::to_string(worst));
  if (o.pass) o.detail << "max ||overlap| - 1| " << worst;
  return o;
}

std::vector<PathSegment> cap(double theta) {
  return {BlochLoop{0.0, theta, 0.0, 1.0}, BlochLoop{theta, theta, kTwoPi / 4.0, 4.0},
          BlochLoop{theta, 0.0, 0.0, 1.0}};
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  int combos = 0;
  const double Cs[] = {0.0, 0.3, 0.6, 0.8, 1.0};
  const double rates_A[] = {-1.0, -0.4, 0.0, 0.5, 1.2};
  const double rates_B[] = {-0.7, 0.0, 0.3, 0.9, 1.5};
  for (double C : Cs) {
    const CoefficientMatrix a(named_state("psi2qubit", std::sqrt(1.0 - C * C), 0.0));
    for (double ra : rates_A) {
      for (double rb : rates_B) {
        ++combos;
        const double T = 3.0;
        const auto p = cartan_pair(2, vec({ra, -ra}), 2, vec({rb, -rb}), T, 600);
        const auto tr = run_trace(a, p);
        for (std::size_t k = 0; k < tr.size(); k += 20) {
          if (tr.magnitude[k] < 1e-6) continue;
          const double t = tr.t[k];
          const auto cf = two_qubit_partial(C, ra * t, rb * t, 0.0, 0.0).aligned(tr.total_phase[k]);
          worst = std::max(worst, phase_distance(cf.phi_g, tr.geometric_phase[k]));
        }
      }
    }
  }
  o.require(combos == 125, "combination count");
  o.require(worst <= 1e-6, "Cartan grid deviation " + std::to_string(worst));

  // Constant-theta loops: Omega = 2 pi (1 - cos theta) on each side.
  double loop_worst = 0.0;
  for (double C : {0.0, 0.6, 1.0}) {
    const CoefficientMatrix a(named_state("psi2qubit", std::sqrt(1.0 - C * C), 0.0));
    for (double thA : {kPi / 6.0, kPi / 3.0, kPi / 2.0}) {
      for (double thB : {0.0, kPi / 4.0, 2.0 * kPi / 3.0}) {
        auto segA = cap(thA);
        segA.push_back(CartanLinear{vec({0.3, -0.3}), 1.0});
        const std::vector<PathSegment> segB =
            thB > 0.0 ? cap(thB) : std::vector<PathSegment>{CartanHold{6.0}};
        std::vector<PathSegment> segB_full = segB;
        segB_full.push_back(CartanHold{1.0});
        const PairEvolution p{LocalEvolution(2, segA), LocalEvolution(2, segB_full), TimeGrid{7.0, 2800}};
        const auto tr = run_trace(a, p);
        const double OA = kTwoPi * (1.0 - std::cos(thA)), OB = kTwoPi * (1.0 - std::cos(thB));
        // End of the loops (t = 6): cyclic, chi = 0, n = 0.
        const std::size_t k6 = 2400;
        const double cyc = two_qubit_cyclic(C, 0, OA, OB);
        loop_worst = std::max(loop_worst, phase_distance(cyc, tr.geometric_phase[k6]));
        // Partially cyclic afterwards: coset closed, chi_A = 0.3 (t - 6).
        const std::size_t kT = tr.size() - 1;
        const auto part = two_qubit_partial(C, 0.3, 0.0, OA, OB);
        if (tr.magnitude[kT] > 1e-6) {
          loop_worst = std::max(loop_worst, phase_distance(part.phi_g, tr.geometric_phase[kT]));
        }
      }
    }
  }
  o.require(loop_worst <= 1e-6, "Bloch loop deviation " + std::to_string(loop_worst));

  // Pure qubit, equatorial loop: phi_g = -Omega/2 = -pi.
  const GeneratorBasis b2(2);
  const QuditDensity pure = density_from_purity(b2, 1.0, vec({1, 0, 0}));
  const LocalEvolution eq(2, cap(kPi / 2.0));
  const auto single = single_qudit_trace(pure, eq, TimeGrid{6.0, 2400});
  const double eq_dev = std::abs(single.geometric_phase.back() - (-kPi));
  o.require(eq_dev <= 1e-6, "equatorial loop phase " + std::to_string(single.geometric_phase.back()));

  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
  if (o.pass) {
    o.detail << combos << " combinations, max deviation " << std::max(worst, loop_worst)
             << ", equatorial " << single.geometric_phase.back() << ", " << elapsed << " s";
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto lat = fractional_lattice(2, 3);
  double worst = 0.0;
  int contacts = 0;
  for (const char* name : {"fig4a", "fig4b", "fig4c", "fig4d"}) {
    const RunResult r = run_scenario(make_preset(name));
    int here = 0;
    for (const auto& e : r.cycles) {
      if (e.continuum) continue;
      ++here;
      worst = std::max(worst, lat.distance(e.phase));
    }
    o.require(here > 0, std::string(name) + ": no unit-circle contacts");
    contacts += here;
  }
  o.require(worst <= 1e-6, "contact off {n pi + 2 m pi/3} by " + std::to_string(worst));
  if (o.pass) o.detail << contacts << " contacts, max distance " << worst;
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937 rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int dA = 2 + static_cast<int>(rng() % 3);
    const int dB = dA + static_cast<int>(rng() % (5 - dA));
    const CoefficientMatrix a(testing::random_state(rng, dA, dB));
    const CoefficientMatrix b = apply_local(a, testing::random_special_unitary(rng, dA),
                                            testing::random_special_unitary(rng, dB));
    const auto ra = entanglement_report(a), rb = entanglement_report(b);
    double dev = std::max({std::abs(ra.C - rb.C), std::abs(ra.C_m - rb.C_m), std::abs(ra.D - rb.D)});
    for (std::size_t p = 0; p < ra.traces.size(); ++p) dev = std::max(dev, std::abs(ra.traces[p] - rb.traces[p]));
    o.require(ra.traces.size() == static_cast<std::size_t>(dA), "Tr[Q^2p] count");
    worst = std::max(worst, dev);
  }
  o.require(worst < 1e-10, "invariant drift " + std::to_string(worst));
  if (o.pass) o.detail << "200 states, max drift " << worst;
  return o;
}

Outcome criterion7() {
  Outcome o;
  double gram = 0.0;
  for (int d = 2; d <= 6; ++d) {
    const GeneratorBasis b(d);
    gram = std::max(gram, (b.gram() - CMatrix::Identity(b.size(), b.size())).cwiseAbs().maxCoeff());
  }
  o.require(gram <= 1e-12, "generator orthonormality " + std::to_string(gram));

  std::mt19937 rng(77);
  double pyth = 0.0;
  for (int d = 2; d <= 5; ++d) {
    const GeneratorBasis b(d);
    for (int rep = 0; rep < 20; ++rep) {
      const CMatrix G = testing::random_traceless_hermitian(rng, d);
      const CMatrix W = testing::random_special_unitary(rng, d);
      const RVector h0 = RVector::Random(d - 1), hdot = RVector::Random(d - 1);
      const double t = 0.61;
      const auto angles = CartanAngles::from_coordinates(b, h0 + hdot * t);
      const CMatrix V = HermitianExponential(G).at(t) * W;
      const CMatrix V_dot = kI * G * V;
      const CMatrix D = cartan_exponential(b, angles);
      RVector full = RVector::Zero(b.size());
      full.head(d - 1) = hdot;
      const CMatrix U = V * D;
      const CMatrix U_dot = V_dot * D + U * (kI * b.combine(full));
      const RVector u = velocity_vector(b, U, U_dot);
      const auto dec = decompose_velocity(b, u, angles, b.coordinates(-kI * V.adjoint() * V_dot));
      pyth = std::max(pyth, std::abs(u.squaredNorm() - dec.v_perp_rot.squaredNorm() -
                                     (dec.v_par + dec.h_dot).squaredNorm()));
    }
  }
  o.require(pyth <= 1e-10, "Pythagoras residual " + std::to_string(pyth));

  double svd = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int dA = 2 + i % 3, dB = dA + i % 2;
    const CoefficientMatrix a(testing::random_state(rng, dA, dB));
    svd = std::max(svd, (schmidt_decompose(a).reconstruct() - a.matrix()).norm());
  }
  o.require(svd <= 1e-10, "SVD reconstruction " + std::to_string(svd));

  // Dynamical phase of a pure qubit on a tilted spiral, known in closed form.
  const double th1 = 2.0, w = 1.7, T = 2.0;
  const LocalEvolution e(2, {BlochLoop{0.0, th1, w, T}});
  const double exact = 0.5 * w * (T - std::sin(th1) * T / th1);
  const QuditDensity pure = density_from_purity(GeneratorBasis(2), 1.0, vec({1, 0, 0}));
  std::vector<double> err;
  for (int n : {8, 16, 32, 64}) {
    err.push_back(std::abs(single_qudit_trace(pure, e, TimeGrid{T, n}).dynamical_phase.back() - exact));
  }
  double order = 1e9;
  for (std::size_t i = 1; i < err.size(); ++i) order = std::min(order, std::log2(err[i - 1] / err[i]));
  o.require(order >= 3.5, "Simpson order " + std::to_string(order));
  if (o.pass) {
    o.detail << "gram " << gram << ", Pythagoras " << pyth << ", SVD " << svd << ", Simpson order "
             << order;
  }
  return o;
}

// Rebalances an explicit diagonal pair onto (A+B)/2 on both sides.
ScenarioConfig rebalanced(ScenarioConfig c) {
  const auto& a = std::get<CartanLinear>(c.path_A.at(0));
  const auto& b = std::get<CartanLinear>(c.path_B.at(0));
  const CartanLinear half{(a.rates + b.rates) / 2.0, a.duration};
  c.path_A = {half};
  c.path_B = {half};
  return c;
}

Outcome criterion8() {
  Outcome o;
  double worst = 0.0;
  auto compare = [&](const std::string& name, const RunResult& x, const RunResult& y) {
    o.require(x.trace.size() == y.trace.size(), name + ": row count");
    for (std::size_t k = 0; k < x.trace.size(); ++k) {
      const double dev = std::max({std::abs(x.trace.overlap[k] - y.trace.overlap[k]),
                                   std::abs(x.trace.total_phase[k] - y.trace.total_phase[k]),
                                   std::abs(x.trace.dynamical_phase[k] - y.trace.dynamical_phase[k]),
                                   std::abs(x.trace.geometric_phase[k] - y.trace.geometric_phase[k])});
      worst = std::max(worst, dev);
    }
  };
  int runs = 0;
  for (const auto& name : preset_names()) {
    const ScenarioConfig c = make_preset(name);
    if (!c.totals) continue;
    ScenarioConfig h = c;
    h.split = Split::kHalf;
    compare(name, run_scenario(c), run_scenario(h));
    ++runs;
  }
  // Explicit equal-dimension paths on a diagonal state. (fig6 starts from a
  // non-diagonal state, where the overlap sees chi_A and chi_B separately.)
  for (const char* name : {"qubits"}) {
    const ScenarioConfig c = make_preset(name);
    compare(name, run_scenario(c), run_scenario(rebalanced(c)));
    ++runs;
  }
  o.require(worst <= 1e-9, "split deviation " + std::to_string(worst));
  if (o.pass) o.detail << runs << " presets, max row deviation " << worst;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"fractional lattice", criterion1},
      {"three-cusp qutrit overlap", criterion2},
      {"product state circle", criterion3},
      {"two-qubit closed forms", criterion4},
      {"qubit-qutrit contacts", criterion5},
      {"local-unitary invariance", criterion6},
      {"structural properties", criterion7},
      {"split independence", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::printf("criterion %zu (%s): %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.str().c_str());
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
