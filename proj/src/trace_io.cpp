#include "qphase/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace qphase {

namespace {

std::vector<std::string> footer_lines(const RunResult& run) {
  const auto& r = run.report;
  std::vector<std::string> out;
  out.push_back("scenario: " + run.config.name);
  if (run.config.single()) {
    out.push_back("dims: " + std::to_string(run.config.d_A));
    out.push_back("purity: " + format_double(r.q_A));
  } else {
    out.push_back("dims: " + std::to_string(r.d_A) + " " + std::to_string(r.d_B));
    out.push_back("C: " + format_double(r.C));
    out.push_back("C_m: " + format_double(r.C_m));
    std::string traces = "Tr[Q^2p]:";
    for (double x : r.traces) traces += " " + format_double(x);
    out.push_back(traces);
    out.push_back("D: " + format_double(r.D));
  }
  out.push_back("max_unitarity_residual: " + format_double(run.trace.max_unitarity_residual));
  if (run.trace.trapezoid_fallback) {
    out.push_back("warning: a quadrature piece had a single interval (trapezoid rule used)");
  }
  for (const auto& w : run.config.warnings) out.push_back("warning: " + w);
  std::size_t indeterminate = 0;
  for (bool b : run.trace.indeterminate) indeterminate += b;
  if (indeterminate > 0) {
    out.push_back("indeterminate_samples: " + std::to_string(indeterminate));
  }
  for (const auto& e : run.cycles) {
    std::string line = e.continuum ? "cycle: continuum" : "cycle:";
    line += " t=" + format_double(e.t_cycle) + " phase=" + format_double(e.phase) +
            " abs_overlap=" + format_double(e.magnitude);
    if (e.n_A) line += " n_A=" + std::to_string(*e.n_A);
    if (e.n_B) line += " n_B=" + std::to_string(*e.n_B);
    out.push_back(line);
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const RunResult& run) {
  const PhaseTrace& t = run.trace;
  for (std::size_t c = 0; c < std::size(kTraceColumns); ++c) {
    os << (c ? "," : "") << kTraceColumns[c];
  }
  os << '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << format_double(t.t[k]) << ',' << format_double(t.overlap[k].real()) << ','
       << format_double(t.overlap[k].imag()) << ',' << format_double(t.magnitude[k]) << ','
       << format_double(t.total_phase[k]) << ',' << format_double(t.dynamical_phase[k]) << ','
       << format_double(t.geometric_phase[k]) << '\n';
  }
  for (const auto& line : footer_lines(run)) os << "# " << line << '\n';
}

void write_json(std::ostream& os, const RunResult& run) {
  using nlohmann::json;
  const PhaseTrace& t = run.trace;
  std::vector<double> re(t.size()), im(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    re[k] = t.overlap[k].real();
    im[k] = t.overlap[k].imag();
  }
  json j;
  j["name"] = run.config.name;
  j["t"] = t.t;
  j["re_overlap"] = re;
  j["im_overlap"] = im;
  j["abs_overlap"] = t.magnitude;
  j["total_phase"] = t.total_phase;
  j["dynamical_phase"] = t.dynamical_phase;
  j["geometric_phase"] = t.geometric_phase;
  const auto& r = run.report;
  j["diagnostics"] = {{"d_A", r.d_A},
                      {"d_B", run.config.single() ? 0 : r.d_B},
                      {"C", r.C},
                      {"C_m", r.C_m},
                      {"traces", r.traces},
                      {"D", r.D},
                      {"max_unitarity_residual", t.max_unitarity_residual},
                      {"trapezoid_fallback", t.trapezoid_fallback},
                      {"warnings", run.config.warnings}};
  json cycles = json::array();
  for (const auto& e : run.cycles) {
    json c = {{"t", e.t_cycle}, {"phase", e.phase}, {"abs_overlap", e.magnitude},
              {"continuum", e.continuum}};
    c["n_A"] = e.n_A ? json(*e.n_A) : json(nullptr);
    c["n_B"] = e.n_B ? json(*e.n_B) : json(nullptr);
    cycles.push_back(c);
  }
  j["cycles"] = cycles;
  os << j.dump(1) << '\n';
}

ParsedTrace read_csv(std::istream& is) {
  ParsedTrace out;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty trace file");
  std::string expected;
  for (std::size_t c = 0; c < std::size(kTraceColumns); ++c) {
    expected += (c ? "," : "") + std::string(kTraceColumns[c]);
  }
  if (line != expected) throw std::runtime_error("unexpected CSV header: " + line);
  PhaseTrace& t = out.trace;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.footer.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    double v[7];
    const char* p = line.c_str();
    for (int c = 0; c < 7; ++c) {
      char* end = nullptr;
      v[c] = std::strtod(p, &end);
      if (end == p || (c < 6 && *end != ',') || (c == 6 && *end != '\0')) {
        throw std::runtime_error("malformed CSV row " + std::to_string(row));
      }
      p = end + 1;
    }
    t.t.push_back(v[0]);
    t.overlap.emplace_back(v[1], v[2]);
    t.magnitude.push_back(v[3]);
    t.total_phase.push_back(v[4]);
    t.dynamical_phase.push_back(v[5]);
    t.geometric_phase.push_back(v[6]);
    t.indeterminate.push_back(false);
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::ostringstream tag;
  tag << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const fs::path tmp = target.string() + tag.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace qphase
