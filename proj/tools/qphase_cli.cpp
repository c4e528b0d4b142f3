// qphase: run, verify and inspect geometric-phase scenarios.
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qphase/phase_engine.hpp"
#include "qphase/scenario.hpp"
#include "qphase/trace_io.hpp"
#include "qphase/verify.hpp"

namespace fs = std::filesystem;
using namespace qphase;

namespace {

enum Exit { kOk = 0, kToleranceExceeded = 1, kConfig = 2, kGuard = 3, kNoOracle = 4 };

struct Common {
  int steps = 0;
  std::string split = "a-only";
  std::string format = "csv";
  std::string output;
};

// A path to a scenario file, or a preset name.
ScenarioConfig resolve(const std::string& what, const Common& opt) {
  ScenarioConfig c = fs::exists(what) ? load_scenario(what) : make_preset(what);
  if (opt.steps > 0) c.set_steps(opt.steps);
  c.split = opt.split == "half" ? Split::kHalf : Split::kAOnly;
  return c;
}

std::string render(const RunResult& r, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    write_json(os, r);
  } else {
    write_csv(os, r);
  }
  return os.str();
}

void emit(const RunResult& r, const Common& opt) {
  for (const auto& w : r.config.warnings) std::cerr << "warning: " << w << '\n';
  const std::string text = render(r, opt.format);
  if (opt.output.empty() || opt.output == "-") {
    std::cout << text;
  } else {
    write_file_atomic(opt.output, text);
  }
}

// Maps library exceptions onto the documented exit codes.
template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalGuardError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kGuard;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}

int print_verify(const ScenarioConfig& c, double tolerance) {
  const VerifyReport rep = verify_scenario(c, tolerance);
  for (const auto& line : rep.lines()) std::cout << line << '\n';
  return rep.exit_code();
}

int run_batch(const std::string& dir, const Common& opt) {
  if (!fs::is_directory(dir)) throw ConfigError(dir + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  const fs::path out_dir = opt.output.empty() ? fs::path(dir) : fs::path(opt.output);
  fs::create_directories(out_dir);

  struct Outcome {
    int code;
    std::string message;
  };
  std::vector<std::future<Outcome>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [f, out_dir, opt] {
      Outcome o{0, ""};
      try {
        ScenarioConfig c = load_scenario(f.string());
        if (opt.steps > 0) c.set_steps(opt.steps);
        const RunResult r = run_scenario(c);
        const fs::path target = out_dir / (f.stem().string() + (opt.format == "json" ? ".json" : ".csv"));
        write_file_atomic(target.string(), render(r, opt.format));
        o.message = f.filename().string() + " -> " + target.string();
      } catch (const NumericalGuardError& e) {
        o = {kGuard, f.filename().string() + ": numerical guard: " + e.what()};
      } catch (const std::exception& e) {
        o = {kConfig, f.filename().string() + ": config error: " + e.what()};
      }
      return o;
    }));
  }
  int worst = kOk;
  for (auto& j : jobs) {
    const Outcome o = j.get();
    (o.code ? std::cerr : std::cout) << o.message << '\n';
    worst = std::max(worst, o.code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric, dynamical and total phases of entangled qudits"};
  app.require_subcommand(1);
  Common opt;
  double tolerance = 1e-6;

  auto add_common = [&](CLI::App* sub, bool with_output) {
    sub->add_option("--steps", opt.steps, "Override the grid step count")->check(CLI::PositiveNumber);
    sub->add_option("--split", opt.split, "Share per-level totals: a-only or half")
        ->check(CLI::IsMember({"a-only", "half"}));
    if (with_output) {
      sub->add_option("--output", opt.output, "Output file (default: stdout)");
      sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }
  };

  std::string target;
  auto* run = app.add_subcommand("run", "Run a scenario file (or preset) and emit its trace");
  run->add_option("config", target, "Scenario file or preset name")->required();
  add_common(run, true);

  auto* figure = app.add_subcommand("figure", "Run a named preset (see --list)");
  figure->add_option("preset", target, "Preset name");
  bool list = false;
  figure->add_flag("--list", list, "List preset names");
  add_common(figure, true);

  int d_A = 0, d_B = 0;
  auto* lattice = app.add_subcommand("lattice", "Print the fractional phase lattice for (d_A, d_B)");
  lattice->add_option("d_A", d_A)->required()->check(CLI::Range(2, 1000));
  lattice->add_option("d_B", d_B)->required()->check(CLI::Range(2, 1000));

  auto* verify = app.add_subcommand("verify", "Compare a scenario against its closed form");
  verify->add_option("config", target, "Scenario file or preset name")->required();
  verify->add_option("--tolerance", tolerance, "Oracle tolerance (radians)")->check(CLI::PositiveNumber);
  add_common(verify, false);

  std::string dir;
  auto* batch = app.add_subcommand("batch", "Run every .yaml scenario in a directory concurrently");
  batch->add_option("dir", dir, "Directory of scenario files")->required();
  batch->add_option("--output", opt.output, "Output directory (default: the input directory)");
  batch->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  batch->add_option("--steps", opt.steps, "Override the grid step count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*run) {
    return guarded([&] {
      emit(run_scenario(resolve(target, opt)), opt);
      return kOk;
    });
  }
  if (*figure) {
    if (list || target.empty()) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
      return kOk;
    }
    return guarded([&] {
      if (fs::exists(target)) throw ConfigError(target + ": figure takes a preset name");
      emit(run_scenario(resolve(target, opt)), opt);
      return kOk;
    });
  }
  if (*lattice) {
    const FractionalLattice lat = fractional_lattice(d_A, d_B);
    const auto labels = lat.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) std::cout << (i ? ", " : "") << labels[i];
    std::cout << '\n';
    for (std::size_t i = 0; i < lat.values.size(); ++i) {
      std::cout << (i ? ", " : "") << format_double(lat.values[i]);
    }
    std::cout << '\n';
    return kOk;
  }
  if (*verify) return guarded([&] { return print_verify(resolve(target, opt), tolerance); });
  if (*batch) return guarded([&] { return run_batch(dir, opt); });
  return kConfig;
}
