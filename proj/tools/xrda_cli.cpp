#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "xrda/harness/experiment.hpp"
#include "xrda/harness/text_io.hpp"

namespace {

using namespace xrda;
using namespace xrda::harness;
namespace fs = std::filesystem;

struct Globals {
  std::vector<std::string> configs;
  std::string out;
  bool unsafe = false;
  Eigen::Index stride = 0;
  unsigned jobs = 1;
};

RunOverrides overrides(const Globals& g) {
  RunOverrides ov;
  if (!g.out.empty()) ov.out_dir = g.out;
  if (g.stride > 0) ov.stride = g.stride;
  ov.unsafe = g.unsafe;
  ov.jobs = g.jobs;
  return ov;
}

/// Loads every config, printing all errors. Returns false on any failure.
bool load_all(const Globals& g, std::vector<ExperimentConfig>& out) {
  if (g.configs.empty()) {
    std::cerr << "error: --config is required\n";
    return false;
  }
  bool ok = true;
  for (const auto& path : g.configs) {
    auto res = load_config(path);
    if (!res.ok()) {
      for (const auto& e : res.errors) std::cerr << path << ": " << e << '\n';
      ok = false;
      continue;
    }
    out.push_back(std::move(*res.config));
  }
  return ok;
}

int cmd_run(const Globals& g) {
  std::vector<ExperimentConfig> cfgs;
  if (!load_all(g, cfgs)) return kExitValidation;
  int status = kExitOk;
  for (const auto& cfg : cfgs) {
    const auto rep = run_experiment(cfg, overrides(g));
    std::cout << "reference f* = " << format_double(rep.reference.f_star)
              << " (certified gap " << format_double(rep.reference.certified_gap) << ")\n";
    for (const auto& t : rep.traces) std::cout << "wrote " << t.string() << '\n';
    for (const auto& h : rep.halted) {
      std::cerr << "halted: " << h << '\n';
      status = kExitRuntime;
    }
  }
  return status;
}

int cmd_compare(const Globals& g, const std::vector<std::string>& preset_names) {
  std::vector<ExperimentConfig> cfgs;
  if (!load_all(g, cfgs)) return kExitValidation;
  std::vector<Preset> presets;
  for (const auto& name : preset_names) {
    auto p = preset_from_string(name);
    if (!p) {
      std::cerr << "error: unknown preset '" << name << "'\n";
      return kExitValidation;
    }
    presets.push_back(*p);
  }
  const auto rep = compare(cfgs, presets, overrides(g));
  std::cout << rep.table << "wrote " << rep.csv_path.string() << '\n';
  return kExitOk;
}

int cmd_check_bound(const std::vector<std::string>& traces, bool stochastic, double slack) {
  std::vector<fs::path> paths(traces.begin(), traces.end());
  const auto rep = check_bound(paths, !stochastic, slack);
  for (const auto& l : rep.lines) std::cout << l << '\n';
  std::cout << (rep.passed() ? "PASS" : "FAIL") << ": " << rep.violations << " violation(s) in " << rep.rows_checked
            << " check(s)\n";
  return rep.passed() ? kExitOk : kExitBoundFailure;
}

int cmd_gen_problem(const Globals& g) {
  std::vector<ExperimentConfig> cfgs;
  if (!load_all(g, cfgs)) return kExitValidation;
  for (const auto& cfg : cfgs) {
    const fs::path dir = g.out.empty() ? cfg.output.dir : fs::path(g.out);
    for (const auto& p : generate_problem(cfg, dir)) std::cout << "wrote " << p.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended regularized dual averaging experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.configs, "Experiment config file (repeatable)");
  app.add_option("--out", g.out, "Output directory (overrides [output] dir)");
  app.add_flag("--unsafe", g.unsafe, "Continue past schedule violations; traces lose the bound column");
  app.add_option("--stride", g.stride, "Logging stride (overrides [run] stride)")->check(CLI::PositiveNumber);
  app.add_option("--jobs", g.jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment and write one trace per seed");
  auto* cmp_cmd = app.add_subcommand("compare", "Compare schedules on one problem instance");
  std::vector<std::string> presets;
  cmp_cmd->add_option("--presets", presets, "Presets to run on the config's problem")->delimiter(',');
  auto* chk_cmd = app.add_subcommand("check-bound", "Check traces against the convergence bound");
  std::vector<std::string> traces;
  bool stochastic = false;
  double slack = 1e-9;
  chk_cmd->add_option("traces", traces, "Trace CSV files");
  chk_cmd->add_flag("--stochastic", stochastic, "Check the seed mean of the final gap against 1.10 x bound");
  chk_cmd->add_option("--slack", slack, "Additive slack");
  auto* gen_cmd = app.add_subcommand("gen-problem", "Write a synthetic dataset to text files");

  for (auto* sub : {run_cmd, cmp_cmd, chk_cmd, gen_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run_cmd) return cmd_run(g);
    if (*cmp_cmd) return cmd_compare(g, presets);
    if (*chk_cmd) return cmd_check_bound(traces, stochastic, slack);
    if (*gen_cmd) return cmd_gen_problem(g);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
