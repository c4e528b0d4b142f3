#include "qphase/verify.hpp"

#include <cmath>
#include <functional>

#include "qphase/closed_form.hpp"
#include "qphase/trace_io.hpp"

namespace qphase {

namespace {

using Oracle = std::function<std::optional<ClosedFormResult>(double)>;

struct Selected {
  std::string name;
  Oracle at;
};

bool has_generator(const LocalEvolution& evo) {
  for (const auto& s : evo.segments()) {
    if (std::holds_alternative<GeneratorConst>(s)) return true;
  }
  return false;
}

bool is_diagonal_state(const CMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j && std::abs(a(i, j)) > 1e-12) return false;
    }
  }
  return true;
}

DiagonalProfile profile_or_any(const GeneratorBasis& basis, const RVector& weights, double w) {
  if (w < 1e-12) return DiagonalProfile::from_angle(basis, 0.0);
  return DiagonalProfile::from_weights(weights, w);
}

std::optional<Selected> select_single(const ScenarioConfig& c, const PreparedScenario& p) {
  const QuditDensity& rho = *p.density;
  const int d = c.d_A;
  const LocalEvolution& A = p.pair.A;
  if (!is_diagonal_state(rho.rho)) return std::nullopt;
  const RVector diag = rho.rho.diagonal().real();

  if (A.is_diagonal()) {
    if (d == 3 && c.state.kind == StateSpec::Kind::kSchmidt) {
      const double q = c.state.q, theta = c.state.theta;
      return Selected{"single_qutrit_diagonal", [&A, q, theta](double t) {
                        const RVector chi = A.factors(t).chi;
                        return std::optional(single_qutrit_diagonal(q, theta, chi(0), chi(1)));
                      }};
    }
    const GeneratorBasis basis(d);
    const double w = rho.q * std::sqrt((d - 1.0) / d);
    const DiagonalProfile x = profile_or_any(basis, diag, w);
    const double q = rho.q;
    return Selected{"single_qudit_diagonal", [&A, d, q, x](double t) {
                      return std::optional(single_qudit_diagonal(d, q, x, A.factors(t).chi));
                    }};
  }
  if (d == 2 && !has_generator(A)) {
    const double q = diag(0) - diag(1);
    return Selected{"single_qubit_partial", [&A, q](double t) -> std::optional<ClosedFormResult> {
                      if (!A.coset_closed(t, 1e-9)) return std::nullopt;
                      return single_qubit_partial(q, A.factors(t).chi(0), A.bloch_area(t));
                    }};
  }
  return std::nullopt;
}

std::optional<Selected> select_pair(const ScenarioConfig& c, const PreparedScenario& p,
                                    const EntanglementReport& r) {
  const CMatrix& a = p.alpha.matrix();
  const LocalEvolution& A = p.pair.A;
  const LocalEvolution& B = p.pair.B;
  const bool diagonal_paths = A.is_diagonal() && B.is_diagonal();
  const double C = r.C;

  if (c.d_A == 2 && c.d_B == 3 && diagonal_paths &&
      (a - named_state("psiqubitqutrit2", 0.0, 0.0)).norm() < 1e-12) {
    return Selected{"qubit_qutrit_dual", [&A, &B](double t) {
                      const RVector ca = A.factors(t).chi, cb = B.factors(t).chi;
                      return std::optional(qubit_qutrit_dual(ca(0), cb(0), cb(1), cb(2)));
                    }};
  }
  if (!is_diagonal_state(a)) return std::nullopt;
  const bool leading = std::abs(a(0, 0)) >= std::abs(a(1, 1));

  if (c.d_A == 2 && c.d_B == 2 && leading && !has_generator(A) && !has_generator(B)) {
    return Selected{"two_qubit_partial", [&A, &B, C](double t) -> std::optional<ClosedFormResult> {
                      if (!A.coset_closed(t, 1e-9) || !B.coset_closed(t, 1e-9)) return std::nullopt;
                      return two_qubit_partial(C, A.factors(t).chi(0), B.factors(t).chi(0),
                                               A.bloch_area(t), B.bloch_area(t));
                    }};
  }
  if (!diagonal_paths) return std::nullopt;
  if (c.d_A == c.d_B) {
    const int d = c.d_A;
    if (d == 3 && c.state.kind == StateSpec::Kind::kSchmidt) {
      const double q = c.state.q, theta = c.state.theta;
      return Selected{"two_qutrit_example", [&A, &B, q, theta](double t) {
                        const RVector chiT = A.factors(t).chi + B.factors(t).chi;
                        return std::optional(two_qutrit_example(q, theta, chiT(0), chiT(1)));
                      }};
    }
    const GeneratorBasis basis(d);
    const double w = r.weight_A();
    const RVector weights = a.diagonal().cwiseAbs2();
    const DiagonalProfile x = profile_or_any(basis, weights, w);
    return Selected{"two_qudit_diagonal", [&A, &B, d, C, x](double t) {
                      return std::optional(
                          two_qudit_diagonal(d, C, x, A.factors(t).chi + B.factors(t).chi));
                    }};
  }
  if (c.d_A == 2 && c.d_B == 3 && leading) {
    return Selected{"qubit_qutrit_effective", [&A, &B, C](double t) {
                      const RVector ca = A.factors(t).chi, cb = B.factors(t).chi;
                      return std::optional(qubit_qutrit_effective(C, ca(0), cb(0), cb(1)));
                    }};
  }
  return std::nullopt;
}

}  // namespace

bool VerifyReport::oracle_ok() const {
  return comparison && comparison->compared > 0 && comparison->max_total_dev <= tolerance &&
         comparison->max_geometric_dev <= tolerance;
}

bool VerifyReport::invariants_ok() const {
  for (const auto& c : invariants) {
    if (!c.ok()) return false;
  }
  return true;
}

int VerifyReport::exit_code() const {
  if (!comparison) return 4;
  return oracle_ok() && invariants_ok() ? 0 : 1;
}

std::vector<std::string> VerifyReport::lines() const {
  std::vector<std::string> out;
  out.push_back("scenario: " + run.config.name);
  if (comparison) {
    out.push_back("oracle: " + comparison->oracle + " (" + std::to_string(comparison->compared) +
                  " samples)");
    out.push_back("max |total - closed_form| (mod 2pi): " + format_double(comparison->max_total_dev) +
                  (comparison->max_total_dev <= tolerance ? "  ok" : "  EXCEEDS ") +
                  (comparison->max_total_dev <= tolerance ? "" : format_double(tolerance)));
    out.push_back("max |geometric - closed_form| (mod 2pi): " +
                  format_double(comparison->max_geometric_dev) +
                  (comparison->max_geometric_dev <= tolerance ? "  ok" : "  EXCEEDS ") +
                  (comparison->max_geometric_dev <= tolerance ? "" : format_double(tolerance)));
  } else {
    out.push_back("oracle: none (no closed form covers this scenario; engine-only report)");
  }
  for (const auto& c : invariants) {
    out.push_back(c.name + ": " + format_double(c.value) + (c.ok() ? "  ok" : "  EXCEEDS " + format_double(c.limit)));
  }
  if (run.cycles.empty()) out.push_back("cycles: none");
  for (const auto& e : run.cycles) {
    std::string s = e.continuum ? "cycle: continuum (|overlap| = 1 throughout)"
                                : "cycle: t=" + format_double(e.t_cycle) + " phase=" + format_double(e.phase);
    if (e.n_A) s += " n_A=" + std::to_string(*e.n_A);
    if (e.n_B) s += " n_B=" + std::to_string(*e.n_B);
    out.push_back(s);
  }
  for (const auto& w : run.config.warnings) out.push_back("warning: " + w);
  return out;
}

VerifyReport verify_scenario(const ScenarioConfig& config, double tolerance) {
  VerifyReport rep;
  rep.tolerance = tolerance;
  rep.run = run_scenario(config);
  const PreparedScenario prep = prepare(config);
  const PhaseTrace& tr = rep.run.trace;

  double split = 0.0, excess = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    split = std::max(split, std::abs(tr.geometric_phase[k] - (tr.total_phase[k] - tr.dynamical_phase[k])));
    excess = std::max(excess, tr.magnitude[k] - 1.0);
  }
  rep.invariants.push_back({"|overlap(0) - 1|", std::abs(tr.overlap.front() - 1.0), 1e-12});
  rep.invariants.push_back({"max(|overlap| - 1)", std::max(0.0, excess), 1e-12});
  rep.invariants.push_back({"max |geometric - (total - dynamical)|", split, 1e-12});
  rep.invariants.push_back({"max unitarity residual", tr.max_unitarity_residual, config.tol.unitarity});

  // Maximally entangled equal-dimension pairs: every cycle sits on the lattice.
  const auto& r = rep.run.report;
  if (!config.single() && r.d_A == r.d_B && std::abs(r.C - r.C_m) < 1e-9) {
    const auto lat = fractional_lattice(r.d_A, r.d_B);
    double worst = 0.0;
    for (const auto& e : rep.run.cycles) {
      if (!e.continuum) worst = std::max(worst, lat.distance(e.phase));
    }
    rep.invariants.push_back({"max cycle distance from fractional lattice", worst, config.tol.lattice});
  }

  const auto selected = config.single() ? select_single(config, prep)
                                        : select_pair(config, prep, r);
  if (!selected) return rep;
  OracleComparison cmp;
  cmp.oracle = selected->name;
  const double omega = prep.pair.phase_rate_A + prep.pair.phase_rate_B;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.magnitude[k] < 1e-6) continue;
    const auto cf = selected->at(tr.t[k]);
    if (!cf) continue;
    ++cmp.compared;
    cmp.max_total_dev = std::max(cmp.max_total_dev,
                                 phase_distance(tr.total_phase[k], cf->total() + omega * tr.t[k]));
    cmp.max_geometric_dev = std::max(cmp.max_geometric_dev, phase_distance(tr.geometric_phase[k], cf->phi_g));
  }
  rep.comparison = cmp;
  return rep;
}

}  // namespace qphase
