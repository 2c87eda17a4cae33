#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xrda/xrda.hpp"

namespace xrda::harness {

/// Data source of the [problem] section.
enum class DataSource { Synthetic, Inline, Files };

struct ProblemSection {
  LossKind loss = LossKind::LeastAbsoluteDeviation;
  RegularizerKind regularizer = RegularizerKind::Zero;
  MirrorKind mirror = MirrorKind::Euclidean;
  double lambda = 0.0;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  double radius = 1.0;
  DataSource source = DataSource::Synthetic;
  SyntheticRecipe recipe;
  std::optional<Matrix<double>> A;
  std::optional<Vector<double>> b;
  std::optional<Vector<double>> c;
  std::filesystem::path A_file;
  std::filesystem::path b_file;
  std::filesystem::path c_file;
  /// Sorted key=value lines of the section; input to the cache key.
  std::string canonical;
};

struct ScheduleSection {
  Preset preset = Preset::RDA;
  std::string step_kind = "inv_sqrt";
  double step_scale = 1.0;
  double step_exponent = 0.5;
  std::vector<double> step_values;
  double rda_c = 1.0;
  double mu = 0.5;
};

struct RunSection {
  Eigen::Index iterations = 1000;
  bool stochastic = false;
  Eigen::Index batch_size = 1;
  std::vector<std::uint64_t> seeds;
  Eigen::Index stride = 100;
  double reference_tolerance = 1e-9;
  /// Reference baseline budget as a multiple of `iterations` (at least 10).
  Eigen::Index reference_factor = 10;
};

struct OutputSection {
  std::filesystem::path dir = "out";
  std::string name = "trace";
  bool record_time = false;
};

struct ExperimentConfig {
  int spec_version = 1;
  ProblemSection problem;
  ScheduleSection schedule;
  RunSection run;
  OutputSection output;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  /// Every syntax and validation error found, in file order.
  std::vector<std::string> errors;

  [[nodiscard]] bool ok() const { return config.has_value() && errors.empty(); }
};

/// Parses and validates the flat INI-style experiment format. Relative data
/// file paths resolve against `base_dir`.
ConfigResult parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

ConfigResult load_config(const std::filesystem::path& path);

/// Builds the schedule a config describes, optionally overriding the preset.
Schedule<double> make_schedule(const ScheduleSection& s, std::optional<Preset> preset = std::nullopt);

/// Materializes the problem (loading data files when needed).
CompositeProblem<double> make_problem(const ExperimentConfig& cfg);

/// FNV-1a hash of the [problem] section, its data and the reference settings.
std::uint64_t problem_hash(const ExperimentConfig& cfg);

}  // namespace xrda::harness
