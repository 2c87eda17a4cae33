#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xrda/harness/config.hpp"

namespace xrda::harness {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitBoundFailure = 3 };

struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<Eigen::Index> stride;
  bool unsafe = false;
  /// Seeds run on this many threads; output does not depend on it.
  unsigned jobs = 1;
};

struct RunReport {
  std::vector<std::filesystem::path> traces;
  ReferenceSolution<double> reference;
  /// Seeds whose run stopped on a schedule violation, with the message.
  std::vector<std::string> halted;
};

/// Reference optimum for the config, read from or written to the cache file
/// `reference_<hash>.txt` in `dir`.
ReferenceSolution<double> cached_reference(const ExperimentConfig& cfg, const CompositeProblem<double>& p,
                                           const std::filesystem::path& dir);

/// One trace per seed, named `<name>_seed<seed>.csv` in the output dir.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov = {});

struct BoundCheckReport {
  std::vector<std::string> lines;
  Eigen::Index rows_checked = 0;
  Eigen::Index violations = 0;

  [[nodiscard]] bool passed() const { return violations == 0; }
};

/// Strict: gap_best and gap_avg <= bound + slack on every row of every
/// trace. Non-strict: the seed mean of gap_best at the final row is at most
/// 1.10 x bound + slack. Throws ConfigError on an empty list or on traces
/// from unsafe runs (bound column NaN).
BoundCheckReport check_bound(const std::vector<std::filesystem::path>& traces, bool strict, double slack = 1e-9);

struct CompareRow {
  std::string label;
  double final_gap = 0.0;
  Eigen::Index final_nnz = 0;
  double median_backward_step = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  std::string table;
  std::filesystem::path csv_path;
};

/// Runs each schedule on the shared problem of `cfgs` (first seed) and
/// summarises final gap, final nnz and median backward step. With a single
/// config, `presets` lists the schedules; otherwise each config brings its
/// own schedule and all must describe the same problem.
CompareReport compare(const std::vector<ExperimentConfig>& cfgs, const std::vector<Preset>& presets,
                      const RunOverrides& ov = {});

/// Writes A.txt, b.txt (or c.txt) and x_true.txt for a synthetic recipe.
std::vector<std::filesystem::path> generate_problem(const ExperimentConfig& cfg, const std::filesystem::path& dir);

}  // namespace xrda::harness
