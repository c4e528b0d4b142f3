#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qphase/scenario.hpp"

namespace qphase {

/// Fixed CSV column order.
inline constexpr const char* kTraceColumns[] = {"t",           "re_overlap",      "im_overlap",
                                                "abs_overlap", "total_phase",     "dynamical_phase",
                                                "geometric_phase"};

/// %.17g: round-trips every double.
std::string format_double(double x);

/// Header, one row per sample, then '#' footer lines with the diagnostics
/// (C, C_m, Tr[Q^2p], D, max unitarity residual, warnings) and cycles.
void write_csv(std::ostream& os, const RunResult& run);
/// Same columns as arrays keyed by name, plus diagnostics and cycles.
void write_json(std::ostream& os, const RunResult& run);

struct ParsedTrace {
  PhaseTrace trace;  // overlap, magnitude and the three phase columns
  std::vector<std::string> footer;
};

ParsedTrace read_csv(std::istream& is);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace qphase
