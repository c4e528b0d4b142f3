#include <functional>
#include <map>

#include "qphase/scenario.hpp"

namespace qphase {

namespace {

RVector rates(std::initializer_list<double> r) {
  RVector v(static_cast<Eigen::Index>(r.size()));
  Eigen::Index i = 0;
  for (double x : r) v(i++) = x;
  return v;
}

ScenarioConfig base(std::string name, int d_A, int d_B, double t_max, int steps) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.d_A = d_A;
  c.d_B = d_B;
  c.grid = TimeGrid{t_max, steps};
  return c;
}

// Two qutrits, chi_T0 = chi_T1 = t, chi_T2 = -2t.
ScenarioConfig fig1(std::string name, double q) {
  auto c = base(std::move(name), 3, 3, kTwoPi, 4000);
  c.state = {StateSpec::Kind::kSchmidt, q, 0.0, {}, {}};
  c.totals = std::vector<PathSegment>{CartanLinear{rates({1, 1, -2}), kTwoPi}};
  return c;
}

// Two qutrits, chi_T0 = -t while chi_T1 alternates between following t and
// holding, in six branches of length 2 pi/3.
ScenarioConfig fig2(std::string name, double q) {
  auto c = base(std::move(name), 3, 3, 2.0 * kTwoPi, 4200);
  c.state = {StateSpec::Kind::kSchmidt, q, 0.0, {}, {}};
  std::vector<PathSegment> segs;
  for (int k = 0; k < 6; ++k) {
    segs.push_back(CartanLinear{k % 2 == 0 ? rates({-1, 1, 0}) : rates({-1, 0, 1}), kTwoPi / 3.0});
  }
  c.totals = segs;
  return c;
}

// Two qutrits with the same single-qutrit marginals, different entanglement.
ScenarioConfig fig6(std::string name, double q) {
  auto c = base(std::move(name), 3, 3, kTwoPi, 4000);
  c.state = {StateSpec::Kind::kNamed, q, 0.0, {}, "2qutritstate2"};
  c.path_A = {CartanLinear{rates({1, 1, -2}), kTwoPi}};
  c.path_B = {CartanLinear{rates({2, 2, -4}), kTwoPi}};
  return c;
}

// Qubit-qutrit, chi_A = c t, chi_B = (t, t, -2t).
ScenarioConfig fig4(std::string name, double rate, int steps) {
  auto c = base(std::move(name), 2, 3, 2.0 * kTwoPi, steps);
  c.state = {StateSpec::Kind::kNamed, 0.0, 0.0, {}, "psiqubitqutrit2"};
  c.path_A = {CartanLinear{rates({rate, -rate}), 2.0 * kTwoPi}};
  c.path_B = {CartanLinear{rates({1, 1, -2}), 2.0 * kTwoPi}};
  return c;
}

const std::map<std::string, std::function<ScenarioConfig()>>& registry() {
  static const std::map<std::string, std::function<ScenarioConfig()>> r = {
      {"fig1a", [] { return fig1("fig1a", 0.0); }},
      {"fig1b", [] { return fig1("fig1b", 0.2); }},
      {"fig1c", [] { return fig1("fig1c", 0.6); }},
      {"fig1d", [] { return fig1("fig1d", 1.0); }},
      {"fig2a", [] { return fig2("fig2a", 0.0); }},
      {"fig2b", [] { return fig2("fig2b", 0.2); }},
      {"fig2c", [] { return fig2("fig2c", 0.6); }},
      {"fig2d", [] { return fig2("fig2d", 1.0); }},
      {"fig3",
       [] {
         auto c = base("fig3", 3, 3, kTwoPi, 4000);
         c.state = {StateSpec::Kind::kSchmidt, 0.0, 0.0, {}, {}};
         c.totals = std::vector<PathSegment>{CartanLinear{rates({1, 30, -31}), kTwoPi}};
         return c;
       }},
      {"fig4a", [] { return fig4("fig4a", 1.5, 4000); }},
      {"fig4b", [] { return fig4("fig4b", 3.0, 4000); }},
      {"fig4c", [] { return fig4("fig4c", 3.5, 4000); }},
      {"fig4d", [] { return fig4("fig4d", 100.0, 40000); }},
      {"fig6a", [] { return fig6("fig6a", 1.0 / 3.0); }},
      {"fig6b", [] { return fig6("fig6b", 0.5); }},
      {"fig6c", [] { return fig6("fig6c", 2.0 / 3.0); }},
      {"fig6d", [] { return fig6("fig6d", 1.0); }},
      {"qubits",
       [] {
         auto c = base("qubits", 2, 2, kTwoPi, 4000);
         c.state = {StateSpec::Kind::kNamed, 0.8, 0.0, {}, "psi2qubit"};
         c.path_A = {CartanLinear{rates({1, -1}), kTwoPi}};
         c.path_B = {CartanLinear{rates({0.5, -0.5}), kTwoPi}};
         return c;
       }},
      {"qubit-loop",
       [] {
         // Tilt to the equator, one full turn in phi, tilt back, then a
         // diagonal rotation: Omega = 2 pi.
         auto c = base("qubit-loop", 2, 0, 2.0 * kTwoPi, 4000);
         c.state = {StateSpec::Kind::kSchmidt, 0.6, 0.0, {}, {}};
         c.path_A = {BlochLoop{0.0, kPi / 2.0, 0.0, kPi / 2.0},
                     BlochLoop{kPi / 2.0, kPi / 2.0, 1.0, kTwoPi},
                     BlochLoop{kPi / 2.0, 0.0, 0.0, kPi / 2.0},
                     CartanLinear{rates({0.5, -0.5}), kPi}};
         return c;
       }},
      {"qubit-qutrit",
       [] {
         auto c = base("qubit-qutrit", 2, 3, kTwoPi, 4000);
         c.state = {StateSpec::Kind::kNamed, 0.6, 0.0, {}, "psiqubitqutrit"};
         c.path_A = {CartanLinear{rates({1, -1}), kTwoPi}};
         c.path_B = {CartanLinear{rates({1, 1, -2}), kTwoPi}};
         return c;
       }},
      {"qutrit-generator",
       [] {
         // Off-diagonal generator: no closed form covers this path.
         auto c = base("qutrit-generator", 3, 3, kTwoPi, 4000);
         c.state = {StateSpec::Kind::kSchmidt, 0.5, 0.0, {}, {}};
         CMatrix G = CMatrix::Zero(3, 3);
         G(0, 1) = G(1, 0) = 0.5;
         G(1, 2) = Complex(0.0, -0.5);
         G(2, 1) = Complex(0.0, 0.5);
         c.path_A = {GeneratorConst{G, kTwoPi}};
         return c;
       }},
  };
  return r;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& kv : registry()) names.push_back(kv.first);
  return names;
}

ScenarioConfig make_preset(const std::string& name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) {
    std::string list;
    for (const auto& kv : r) list += (list.empty() ? "" : ", ") + kv.first;
    throw ConfigError("unknown preset '" + name + "'; available: " + list);
  }
  return it->second();
}

}  // namespace qphase
