#include "qphase/scenario.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qphase/sud_algebra.hpp"

namespace qphase {

namespace {

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field,
                         const std::string& message) const {
    std::ostringstream os;
    os << source_;
    if (at.IsDefined() && at.Mark().line >= 0) {
      os << ":" << at.Mark().line + 1 << ":" << at.Mark().column + 1;
    }
    os << ": " << field << ": " << message;
    throw ConfigError(os.str());
  }

  YAML::Node require(const YAML::Node& map, const std::string& key,
                     const std::string& field) const {
    YAML::Node n = map[key];
    if (!n.IsDefined() || n.IsNull()) fail(map, field, "missing required key '" + key + "'");
    return n;
  }

  void only_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                 const std::string& field) const {
    if (!map.IsMap()) fail(map, field, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(kv.first, field, "unknown key '" + key + "' (expected one of: " + list + ")");
      }
    }
  }

  // Plain numbers, or multiples of pi such as "2pi", "-pi/3", "4*pi/3", "2π".
  double scalar(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    const std::string s = n.Scalar();
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    static const std::regex pi_expr(
        R"(^\s*([-+]?(?:\d+\.?\d*(?:[eE][-+]?\d+)?)?)\s*\*?\s*(?:pi|π)\s*(?:/\s*(\d+\.?\d*))?\s*$)");
    std::smatch m;
    if (std::regex_match(s, m, pi_expr)) {
      double coef = 1.0;
      const std::string c = m[1].str();
      if (c == "-") coef = -1.0;
      else if (!c.empty() && c != "+") coef = std::stod(c);
      double den = m[2].matched ? std::stod(m[2].str()) : 1.0;
      if (den == 0.0) fail(n, field, "division by zero in '" + s + "'");
      return coef * kPi / den;
    }
    fail(n, field, "cannot read '" + s + "' as a number");
  }

  int integer(const YAML::Node& n, const std::string& field) const {
    const double v = scalar(n, field);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(n, field, "expected an integer");
    return static_cast<int>(v);
  }

  RVector vector(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence()) fail(n, field, "expected a list of numbers");
    RVector v(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = scalar(n[i], field + "[" + std::to_string(i) + "]");
    }
    return v;
  }

  // Entries are numbers or [re, im] pairs.
  CMatrix matrix(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence() || n.size() == 0) fail(n, field, "expected a list of rows");
    const std::size_t rows = n.size();
    std::size_t cols = 0;
    CMatrix M;
    for (std::size_t i = 0; i < rows; ++i) {
      const YAML::Node row = n[i];
      const std::string rf = field + "[" + std::to_string(i) + "]";
      if (!row.IsSequence()) fail(row, rf, "expected a row (list)");
      if (i == 0) {
        cols = row.size();
        M = CMatrix::Zero(rows, cols);
      } else if (row.size() != cols) {
        fail(row, rf, "row has " + std::to_string(row.size()) + " entries, expected " +
                          std::to_string(cols));
      }
      for (std::size_t j = 0; j < cols; ++j) {
        const YAML::Node e = row[j];
        const std::string ef = rf + "[" + std::to_string(j) + "]";
        if (e.IsSequence()) {
          if (e.size() != 2) fail(e, ef, "complex entries are written [re, im]");
          M(i, j) = Complex(scalar(e[0], ef), scalar(e[1], ef));
        } else {
          M(i, j) = scalar(e, ef);
        }
      }
    }
    return M;
  }

  PathSegment segment(const YAML::Node& item, const std::string& field) const {
    if (!item.IsMap() || item.size() != 1) {
      fail(item, field,
           "each segment is a single-key mapping: cartan_linear, hold, bloch_loop or generator_const");
    }
    const auto kind = item.begin()->first.as<std::string>();
    const YAML::Node body = item.begin()->second;
    const std::string f = field + "." + kind;
    if (kind == "cartan_linear") {
      only_keys(body, {"rates", "duration"}, f);
      return CartanLinear{vector(require(body, "rates", f), f + ".rates"),
                          scalar(require(body, "duration", f), f + ".duration")};
    }
    if (kind == "hold") {
      only_keys(body, {"duration"}, f);
      return CartanHold{scalar(require(body, "duration", f), f + ".duration")};
    }
    if (kind == "bloch_loop") {
      only_keys(body, {"theta_start", "theta_end", "phi_rate", "duration"}, f);
      BlochLoop b;
      b.theta_start = body["theta_start"] ? scalar(body["theta_start"], f + ".theta_start") : 0.0;
      b.theta_end = body["theta_end"] ? scalar(body["theta_end"], f + ".theta_end") : b.theta_start;
      b.phi_rate = body["phi_rate"] ? scalar(body["phi_rate"], f + ".phi_rate") : 0.0;
      b.duration = scalar(require(body, "duration", f), f + ".duration");
      return b;
    }
    if (kind == "generator_const") {
      only_keys(body, {"generator", "duration"}, f);
      return GeneratorConst{matrix(require(body, "generator", f), f + ".generator"),
                            scalar(require(body, "duration", f), f + ".duration")};
    }
    fail(item.begin()->first, field, "unknown segment type '" + kind + "'");
  }

  // Segments are validated one prefix at a time so the diagnostic points at
  // the offending entry.
  std::vector<PathSegment> path(const YAML::Node& n, int d, const std::string& field) const {
    if (!n.IsSequence()) fail(n, field, "expected a list of segments");
    std::vector<PathSegment> segs;
    for (std::size_t k = 0; k < n.size(); ++k) {
      const std::string f = field + "[" + std::to_string(k) + "]";
      segs.push_back(segment(n[k], f));
      try {
        LocalEvolution check(d, segs);
      } catch (const std::exception& e) {
        fail(n[k], f, e.what());
      }
    }
    return segs;
  }

 private:
  std::string source_;
};

double path_duration(const std::vector<PathSegment>& segs) {
  double T = 0.0;
  for (const auto& s : segs) T += segment_duration(s);
  return T;
}

std::vector<PathSegment> halve(const std::vector<PathSegment>& totals) {
  std::vector<PathSegment> out;
  for (const auto& s : totals) {
    if (const auto* lin = std::get_if<CartanLinear>(&s)) {
      out.push_back(CartanLinear{lin->rates / 2.0, lin->duration});
    } else if (std::holds_alternative<CartanHold>(s)) {
      out.push_back(s);
    } else {
      throw ConfigError("split half: totals must consist of cartan_linear/hold segments");
    }
  }
  return out;
}

CMatrix embed_diagonal(const CoefficientMatrix& square, int d_B) {
  CMatrix a = CMatrix::Zero(square.d_A(), d_B);
  a.leftCols(square.d_A()) = square.matrix();
  return a;
}

}  // namespace

void ScenarioConfig::set_steps(int steps) {
  if (steps < 2) throw ConfigError(name + ": steps must be at least 2");
  if (steps % 2 != 0) {
    warnings.push_back("steps " + std::to_string(steps) + " is odd; using " +
                       std::to_string(steps + 1) + " for composite Simpson");
    ++steps;
  }
  grid.steps = steps;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  const Parser p(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root.IsMap()) throw ConfigError(source + ": scenario must be a YAML mapping");
  p.only_keys(root, {"name", "dims", "initial_state", "evolution", "grid", "tolerances"}, "scenario");

  ScenarioConfig c;
  c.name = root["name"] ? root["name"].as<std::string>() : source;

  const YAML::Node dims = p.require(root, "dims", "dims");
  if (dims.IsScalar()) {
    c.d_A = p.integer(dims, "dims");
  } else if (dims.IsSequence() && dims.size() == 2) {
    c.d_A = p.integer(dims[0], "dims[0]");
    c.d_B = p.integer(dims[1], "dims[1]");
    if (c.d_B < 2) p.fail(dims, "dims", "each dimension must be at least 2");
    if (c.d_A > c.d_B) p.fail(dims, "dims", "order the qudits so that d_A <= d_B");
  } else {
    p.fail(dims, "dims", "expected d or [d_A, d_B]");
  }
  if (c.d_A < 2) p.fail(dims, "dims", "each dimension must be at least 2");

  const YAML::Node st = p.require(root, "initial_state", "initial_state");
  p.only_keys(st, {"schmidt", "amplitudes", "density", "preset"}, "initial_state");
  if (st.size() != 1) p.fail(st, "initial_state", "give exactly one of schmidt, amplitudes, density, preset");
  if (const YAML::Node s = st["schmidt"]) {
    p.only_keys(s, {"q", "theta"}, "initial_state.schmidt");
    c.state.kind = StateSpec::Kind::kSchmidt;
    c.state.q = p.scalar(p.require(s, "q", "initial_state.schmidt"), "initial_state.schmidt.q");
    c.state.theta = s["theta"] ? p.scalar(s["theta"], "initial_state.schmidt.theta") : 0.0;
    if (c.state.q < 0.0 || c.state.q > 1.0) p.fail(s["q"], "initial_state.schmidt.q", "q must lie in [0, 1]");
  } else if (const YAML::Node a = st["amplitudes"] ? st["amplitudes"] : st["density"]) {
    c.state.kind = StateSpec::Kind::kAmplitudes;
    const bool density = static_cast<bool>(st["density"]);
    if (density != c.single()) {
      p.fail(a, "initial_state", density ? "density is for single-qudit scenarios"
                                         : "single-qudit scenarios take schmidt or density");
    }
    c.state.amplitudes = p.matrix(a, density ? "initial_state.density" : "initial_state.amplitudes");
  } else {
    const YAML::Node pr = st["preset"];
    c.state.kind = StateSpec::Kind::kNamed;
    if (pr.IsScalar()) {
      c.state.name = pr.as<std::string>();
    } else {
      p.only_keys(pr, {"name", "q", "theta"}, "initial_state.preset");
      c.state.name = p.require(pr, "name", "initial_state.preset").as<std::string>();
      c.state.q = pr["q"] ? p.scalar(pr["q"], "initial_state.preset.q") : 0.0;
      c.state.theta = pr["theta"] ? p.scalar(pr["theta"], "initial_state.preset.theta") : 0.0;
    }
  }

  const YAML::Node ev = p.require(root, "evolution", "evolution");
  p.only_keys(ev, {"A", "B", "totals", "phase_rate_A", "phase_rate_B"}, "evolution");
  if (ev["totals"]) {
    if (ev["A"] || ev["B"]) p.fail(ev, "evolution", "give either totals or A/B paths, not both");
    if (c.single() || c.d_A != c.d_B) {
      p.fail(ev["totals"], "evolution.totals", "totals need two qudits of equal dimension");
    }
    c.totals = p.path(ev["totals"], c.d_A, "evolution.totals");
  } else {
    if (ev["A"]) c.path_A = p.path(ev["A"], c.d_A, "evolution.A");
    if (ev["B"]) {
      if (c.single()) p.fail(ev["B"], "evolution.B", "single-qudit scenarios have no B path");
      c.path_B = p.path(ev["B"], c.d_B, "evolution.B");
    }
  }
  if (ev["phase_rate_A"]) c.phase_rate_A = p.scalar(ev["phase_rate_A"], "evolution.phase_rate_A");
  if (ev["phase_rate_B"]) c.phase_rate_B = p.scalar(ev["phase_rate_B"], "evolution.phase_rate_B");

  const double T_paths = std::max(
      c.totals ? path_duration(*c.totals) : path_duration(c.path_A), path_duration(c.path_B));
  c.grid.t_max = T_paths;
  int steps = 4000;
  if (const YAML::Node g = root["grid"]) {
    p.only_keys(g, {"t_max", "steps"}, "grid");
    if (g["t_max"]) c.grid.t_max = p.scalar(g["t_max"], "grid.t_max");
    if (g["steps"]) steps = p.integer(g["steps"], "grid.steps");
    if (!(c.grid.t_max > 0.0)) p.fail(g, "grid.t_max", "t_max must be positive");
    if (steps < 2) p.fail(g["steps"], "grid.steps", "steps must be at least 2");
  }
  if (!(c.grid.t_max > 0.0)) p.fail(root, "grid.t_max", "t_max must be positive (no segment has a duration)");
  const double slack = 1e-9 * c.grid.t_max;
  auto check_cover = [&](const std::vector<PathSegment>& segs, const char* field) {
    if (!segs.empty() && path_duration(segs) + slack < c.grid.t_max) {
      p.fail(ev, field, "path lasts " + std::to_string(path_duration(segs)) +
                            " but grid.t_max is " + std::to_string(c.grid.t_max));
    }
  };
  check_cover(c.totals ? *c.totals : c.path_A, c.totals ? "evolution.totals" : "evolution.A");
  check_cover(c.path_B, "evolution.B");
  c.set_steps(steps);

  if (const YAML::Node t = root["tolerances"]) {
    p.only_keys(t, {"unitarity", "trace", "psd", "cyclic", "lattice", "oracle"}, "tolerances");
    auto set = [&](const char* key, double& field) {
      if (t[key]) {
        field = p.scalar(t[key], std::string("tolerances.") + key);
        if (!(field > 0.0)) p.fail(t[key], std::string("tolerances.") + key, "must be positive");
      }
    };
    set("unitarity", c.tol.unitarity);
    set("trace", c.tol.trace);
    set("psd", c.tol.psd);
    set("cyclic", c.tol.cyclic);
    set("lattice", c.tol.lattice);
    set("oracle", c.tol.oracle);
  }

  // Build once so state errors surface as config errors now.
  try {
    prepare(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    p.fail(st, "initial_state", e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

CMatrix named_state(const std::string& name, double q, double theta) {
  if (name == "psi2qubit") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = std::sqrt((1.0 + q) / 2.0);
    a(1, 1) = std::sqrt((1.0 - q) / 2.0);
    return a;
  }
  if (name == "psiqubitqutrit") {
    CMatrix a = CMatrix::Zero(2, 3);
    a(0, 0) = std::sqrt((1.0 + q) / 2.0);
    a(1, 1) = std::sqrt((1.0 - q) / 2.0);
    return a;
  }
  if (name == "psiqubitqutrit2") {
    CMatrix a = CMatrix::Zero(2, 3);
    a(0, 0) = 1.0 / std::sqrt(2.0);
    a(1, 1) = 0.5;
    a(1, 2) = 0.5;
    return a;
  }
  if (name == "2qutritstate") {
    if (std::abs(theta) > qutrit_theta_bound(q) + 1e-12) {
      throw DomainError("theta outside the physical window for q = " + std::to_string(q));
    }
    CMatrix a = CMatrix::Zero(3, 3);
    for (int n = 0; n < 3; ++n) {
      const double c = std::cos(theta + kTwoPi * (n + 1) / 3.0);
      a(n, n) = std::sqrt(std::max(0.0, (1.0 + 2.0 * q * c) / 3.0));
    }
    return a;
  }
  if (name == "2qutritstate2") {
    if (q < 1.0 / 3.0 - 1e-12 || q > 1.0 + 1e-12) throw DomainError("2qutritstate2 needs 1/3 <= q <= 1");
    CMatrix a = CMatrix::Constant(3, 3, std::sqrt(std::max(0.0, (1.0 - q) / 6.0)));
    for (int n = 0; n < 3; ++n) a(n, n) = std::sqrt(q / 3.0);
    return a;
  }
  throw DomainError("unknown named state '" + name +
                    "' (psi2qubit, psiqubitqutrit, psiqubitqutrit2, 2qutritstate, 2qutritstate2)");
}

PreparedScenario prepare(const ScenarioConfig& c) {
  const double T = c.grid.t_max;
  if (c.single()) {
    const GeneratorBasis basis(c.d_A);
    QuditDensity rho;
    if (c.state.kind == StateSpec::Kind::kSchmidt) {
      const auto x = DiagonalProfile::from_angle(basis, c.state.theta);
      const double w = c.state.q * std::sqrt((c.d_A - 1.0) / c.d_A);
      CMatrix m = CMatrix::Zero(c.d_A, c.d_A);
      for (int n = 0; n < c.d_A; ++n) m(n, n) = 1.0 / c.d_A + w * x.x(n);
      rho = density_from_matrix(basis, m, c.tol);
    } else if (c.state.kind == StateSpec::Kind::kAmplitudes) {
      if (c.state.amplitudes.rows() != c.d_A || c.state.amplitudes.cols() != c.d_A) {
        throw DimensionError("density must be " + std::to_string(c.d_A) + "x" +
                             std::to_string(c.d_A) + ", got " + format_shape(c.state.amplitudes));
      }
      rho = density_from_matrix(basis, c.state.amplitudes, c.tol);
    } else {
      throw ConfigError(c.name + ": named states describe two qudits");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.rho);
    const RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const CMatrix root = es.eigenvectors() * s.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    LocalEvolution A = c.path_A.empty() ? LocalEvolution::identity(c.d_A, T)
                                        : LocalEvolution(c.d_A, c.path_A);
    PairEvolution pair{std::move(A), LocalEvolution::identity(c.d_A, T), c.grid, c.phase_rate_A, 0.0};
    return PreparedScenario{CoefficientMatrix(root, 1e-8), std::move(pair), rho};
  }

  CMatrix alpha;
  switch (c.state.kind) {
    case StateSpec::Kind::kSchmidt: {
      const GeneratorBasis basis(c.d_A);
      const auto x = DiagonalProfile::from_angle(basis, c.state.theta);
      const double w = c.state.q * std::sqrt((c.d_A - 1.0) / c.d_A);
      alpha = embed_diagonal(diagonal_state(x.x, w), c.d_B);
      break;
    }
    case StateSpec::Kind::kAmplitudes:
      alpha = c.state.amplitudes;
      break;
    case StateSpec::Kind::kNamed:
      alpha = named_state(c.state.name, c.state.q, c.state.theta);
      break;
  }
  if (alpha.rows() != c.d_A || alpha.cols() != c.d_B) {
    throw DimensionError("state is " + format_shape(alpha) + " but dims are " +
                         std::to_string(c.d_A) + "x" + std::to_string(c.d_B));
  }

  std::vector<PathSegment> pa = c.path_A;
  std::vector<PathSegment> pb = c.path_B;
  if (c.totals) {
    if (c.split == Split::kHalf) {
      pa = halve(*c.totals);
      pb = pa;
    } else {
      pa = *c.totals;
      pb.clear();
    }
  } else if (c.split == Split::kHalf) {
    throw ConfigError(c.name + ": --split half applies to scenarios written as per-level totals");
  }
  LocalEvolution A = pa.empty() ? LocalEvolution::identity(c.d_A, T) : LocalEvolution(c.d_A, pa);
  LocalEvolution B = pb.empty() ? LocalEvolution::identity(c.d_B, T) : LocalEvolution(c.d_B, pb);
  PairEvolution pair{std::move(A), std::move(B), c.grid, c.phase_rate_A, c.phase_rate_B};
  return PreparedScenario{CoefficientMatrix(alpha), std::move(pair), std::nullopt};
}

RunResult run_scenario(const ScenarioConfig& config) {
  const PreparedScenario prep = prepare(config);
  TraceOptions opts;
  opts.tol = config.tol;
  RunResult r{config, run_trace(prep.alpha, prep.pair, opts), entanglement_report(prep.alpha), {}};
  r.cycles = detect_cycles(r.trace, prep.alpha, prep.pair, config.tol.cyclic);
  return r;
}

}  // namespace qphase
