#include "xrda/harness/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "xrda/harness/text_io.hpp"

namespace xrda::harness {

namespace fs = std::filesystem;

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && errno != ERANGE && std::isfinite(out);
}

bool parse_int(const std::string& tok, long long& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(tok.c_str(), &end, 10);
  return end == tok.c_str() + tok.size() && errno != ERANGE;
}

std::vector<std::string> split_list(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

const std::vector<std::string> kSections = {"problem", "schedule", "run", "output"};

/// Typed access to the parsed sections. Every failure is recorded, none throws.
class Reader {
 public:
  Reader(std::map<std::string, Section>& sections, std::vector<std::string>& errors)
      : sections_(sections), errors_(errors) {}

  const Entry* find(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  bool has(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  void error(const std::string& sec, const std::string& key, const std::string& msg) {
    const Entry* e = peek(sec, key);
    std::string where = e ? "line " + std::to_string(e->line) + ": " : std::string();
    errors_.push_back(where + "[" + sec + "] " + key + ": " + msg);
  }

  std::optional<std::string> word(const std::string& sec, const std::string& key, bool required = false) {
    const Entry* e = find(sec, key);
    if (!e) {
      if (required) error(sec, key, "missing required key");
      return std::nullopt;
    }
    if (e->value.empty()) {
      error(sec, key, "empty value");
      return std::nullopt;
    }
    return e->value;
  }

  template <typename T>
  void number(const std::string& sec, const std::string& key, T& out) {
    const Entry* e = find(sec, key);
    if (!e) return;
    if constexpr (std::is_floating_point_v<T>) {
      double v = 0;
      if (!parse_double(e->value, v)) return error(sec, key, "expected a finite number, got '" + e->value + "'");
      out = static_cast<T>(v);
    } else {
      long long v = 0;
      if (!parse_int(e->value, v)) return error(sec, key, "expected an integer, got '" + e->value + "'");
      if constexpr (std::is_unsigned_v<T>) {
        if (v < 0) return error(sec, key, "must be >= 0");
      }
      out = static_cast<T>(v);
    }
  }

  bool boolean(const std::string& sec, const std::string& key, bool fallback) {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    const std::string v = lower(e->value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    error(sec, key, "expected true or false, got '" + e->value + "'");
    return fallback;
  }

  std::optional<std::vector<double>> doubles(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    for (const auto& tok : split_list(e->value)) {
      double v = 0;
      if (!parse_double(tok, v)) {
        error(sec, key, "not a finite number: '" + tok + "'");
        return std::nullopt;
      }
      out.push_back(v);
    }
    if (out.empty()) {
      error(sec, key, "empty list");
      return std::nullopt;
    }
    return out;
  }

  /// Rows separated by ';', entries by whitespace or commas.
  std::optional<Matrix<double>> matrix(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    std::vector<std::vector<double>> rows;
    std::stringstream ss(e->value);
    std::string row;
    while (std::getline(ss, row, ';')) {
      std::vector<double> vals;
      for (const auto& tok : split_list(row)) {
        double v = 0;
        if (!parse_double(tok, v)) {
          error(sec, key, "not a finite number: '" + tok + "'");
          return std::nullopt;
        }
        vals.push_back(v);
      }
      if (vals.empty()) continue;
      if (!rows.empty() && vals.size() != rows.front().size()) {
        error(sec, key, "rows have different lengths");
        return std::nullopt;
      }
      rows.push_back(std::move(vals));
    }
    if (rows.empty()) {
      error(sec, key, "empty matrix");
      return std::nullopt;
    }
    Matrix<double> A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    return A;
  }

  void report_unused() {
    for (auto& [name, sec] : sections_) {
      for (auto& [key, e] : sec) {
        if (!e.used) {
          const std::string where = name.empty() ? "top level" : "[" + name + "]";
          errors_.push_back("line " + std::to_string(e.line) + ": unknown key '" + key + "' in " + where);
        }
      }
    }
  }

 private:
  const Entry* peek(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  std::map<std::string, Section>& sections_;
  std::vector<std::string>& errors_;
};

std::optional<LossKind> loss_from(const std::string& s) {
  if (s == "logistic") return LossKind::Logistic;
  if (s == "lad") return LossKind::LeastAbsoluteDeviation;
  if (s == "linear") return LossKind::Linear;
  return std::nullopt;
}

std::optional<RegularizerKind> regularizer_from(const std::string& s) {
  if (s == "l1") return RegularizerKind::L1;
  if (s == "box") return RegularizerKind::Box;
  if (s == "simplex") return RegularizerKind::Simplex;
  if (s == "l2_ball") return RegularizerKind::L2Ball;
  if (s == "zero") return RegularizerKind::Zero;
  return std::nullopt;
}

Vector<double> to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector<double>>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector<double> broadcast(const std::vector<double>& v, Eigen::Index d) {
  if (v.size() == 1) return Vector<double>::Constant(d, v.front());
  return to_vector(v);
}

StepSequence<double> make_steps(const ScheduleSection& s) {
  if (s.step_kind == "constant") return StepSequence<double>::constant(s.step_scale);
  if (s.step_kind == "inv_sqrt") return StepSequence<double>::inverse_sqrt(s.step_scale);
  if (s.step_kind == "power") return StepSequence<double>::power(s.step_scale, s.step_exponent);
  return StepSequence<double>::list(s.step_values);
}

void parse_problem(Reader& rd, ExperimentConfig& cfg, const fs::path& base) {
  ProblemSection& p = cfg.problem;
  if (auto v = rd.word("problem", "loss", true)) {
    if (auto k = loss_from(*v)) p.loss = *k;
    else rd.error("problem", "loss", "expected logistic, lad or linear, got '" + *v + "'");
  }
  if (auto v = rd.word("problem", "regularizer")) {
    if (auto k = regularizer_from(*v)) p.regularizer = *k;
    else rd.error("problem", "regularizer", "expected l1, box, simplex, l2_ball or zero, got '" + *v + "'");
  }
  if (auto v = rd.word("problem", "mirror")) {
    if (*v == "euclidean") p.mirror = MirrorKind::Euclidean;
    else if (*v == "entropy") p.mirror = MirrorKind::NegativeEntropy;
    else rd.error("problem", "mirror", "expected euclidean or entropy, got '" + *v + "'");
  }

  rd.number("problem", "lambda", p.lambda);
  if (p.regularizer == RegularizerKind::L1) {
    if (!rd.has("problem", "lambda")) rd.error("problem", "lambda", "missing; required for the l1 regularizer");
    else if (!(p.lambda > 0)) rd.error("problem", "lambda", "must be positive");
  } else if (rd.find("problem", "lambda")) {
    rd.error("problem", "lambda", "only applies to the l1 regularizer");
  }
  if (auto v = rd.doubles("problem", "box_lo")) p.box_lo = *v;
  if (auto v = rd.doubles("problem", "box_hi")) p.box_hi = *v;
  if (p.regularizer == RegularizerKind::Box) {
    if (p.box_lo.empty()) rd.error("problem", "box_lo", "missing; required for the box regularizer");
    if (p.box_hi.empty()) rd.error("problem", "box_hi", "missing; required for the box regularizer");
  } else if (!p.box_lo.empty() || !p.box_hi.empty()) {
    rd.error("problem", p.box_lo.empty() ? "box_hi" : "box_lo", "only applies to the box regularizer");
  }
  rd.number("problem", "radius", p.radius);
  if (p.regularizer == RegularizerKind::L2Ball) {
    if (!(p.radius >= 0)) rd.error("problem", "radius", "must be >= 0");
  } else if (rd.find("problem", "radius")) {
    rd.error("problem", "radius", "only applies to the l2_ball regularizer");
  }
  if (!prox_supported(p.mirror, p.regularizer)) {
    rd.error("problem", "regularizer",
             std::string("unsupported with the ") + to_string(p.mirror) + " mirror (supported: " +
                 (p.mirror == MirrorKind::Euclidean ? "l1, box, l2_ball, zero" : "simplex, zero") + ")");
  }

  const auto data = rd.word("problem", "data");
  const std::string source = data.value_or("synthetic");
  if (source == "synthetic") {
    p.source = DataSource::Synthetic;
    long long rows = -1;
    long long cols = -1;
    long long k = 0;
    rd.number("problem", "rows", rows);
    rd.number("problem", "cols", cols);
    rd.number("problem", "sparsity", k);
    rd.number("problem", "noise", p.recipe.noise);
    rd.number("problem", "seed", p.recipe.seed);
    if (!rd.has("problem", "cols")) rd.error("problem", "cols", "missing; required for synthetic data");
    else if (cols < 1) rd.error("problem", "cols", "must be >= 1");
    if (p.loss != LossKind::Linear) {
      if (!rd.has("problem", "rows")) rd.error("problem", "rows", "missing; required for synthetic data");
      else if (rows < 1) rd.error("problem", "rows", "must be >= 1");
    } else if (rows == -1) {
      rows = 1;
    }
    if (k < 0 || (cols >= 1 && k > cols)) rd.error("problem", "sparsity", "must lie in [0, cols]");
    if (!(p.recipe.noise >= 0)) rd.error("problem", "noise", "must be >= 0");
    p.recipe.rows = static_cast<Eigen::Index>(rows);
    p.recipe.cols = static_cast<Eigen::Index>(cols);
    p.recipe.sparsity = static_cast<Eigen::Index>(k);
  } else if (source == "inline") {
    p.source = DataSource::Inline;
    if (p.loss == LossKind::Linear) {
      if (auto v = rd.doubles("problem", "c")) p.c = to_vector(*v);
      else if (!rd.has("problem", "c")) rd.error("problem", "c", "missing; required for inline linear data");
    } else {
      if (auto m = rd.matrix("problem", "A")) p.A = std::move(*m);
      else if (!rd.has("problem", "A")) rd.error("problem", "A", "missing; required for inline data");
      if (auto v = rd.doubles("problem", "b")) p.b = to_vector(*v);
      else if (!rd.has("problem", "b")) rd.error("problem", "b", "missing; required for inline data");
    }
  } else if (source == "files") {
    p.source = DataSource::Files;
    const auto path_key = [&](const char* key, fs::path& out) {
      if (auto v = rd.word("problem", key, true)) {
        out = fs::path(*v);
        if (out.is_relative() && !base.empty()) out = base / out;
        if (!fs::exists(out)) rd.error("problem", key, "file not found: " + out.string());
      }
    };
    if (p.loss == LossKind::Linear) {
      path_key("c_file", p.c_file);
    } else {
      path_key("A_file", p.A_file);
      path_key("b_file", p.b_file);
    }
  } else {
    rd.error("problem", "data", "expected synthetic, inline or files, got '" + source + "'");
  }
}

void parse_schedule(Reader& rd, ExperimentConfig& cfg) {
  ScheduleSection& s = cfg.schedule;
  if (auto v = rd.word("schedule", "preset", true)) {
    if (auto p = preset_from_string(*v)) s.preset = *p;
    else {
      rd.error("schedule", "preset",
               "expected forward_backward, rda, leap_frog, constant_backward or averaged_leap_frog, got '" + *v + "'");
    }
  }
  if (auto v = rd.word("schedule", "step")) {
    if (*v == "constant" || *v == "inv_sqrt" || *v == "power" || *v == "list") s.step_kind = *v;
    else rd.error("schedule", "step", "expected constant, inv_sqrt, power or list, got '" + *v + "'");
  }
  rd.number("schedule", "step_scale", s.step_scale);
  rd.number("schedule", "step_exponent", s.step_exponent);
  if (auto v = rd.doubles("schedule", "step_values")) s.step_values = *v;
  rd.number("schedule", "rda_c", s.rda_c);
  rd.number("schedule", "mu", s.mu);

  if (s.step_kind == "list" && s.step_values.empty() && !rd.has("schedule", "step_values")) {
    rd.error("schedule", "step_values", "missing; required for step = list");
  }
  if (s.step_kind != "list" && rd.has("schedule", "step_values")) {
    rd.error("schedule", "step_values", "only applies to step = list");
  }
  if (s.step_kind != "power" && rd.has("schedule", "step_exponent")) {
    rd.error("schedule", "step_exponent", "only applies to step = power");
  }
  if (s.preset != Preset::RDA && rd.has("schedule", "rda_c")) {
    rd.error("schedule", "rda_c", "only applies to the rda preset");
  }
  if (s.preset != Preset::AveragedLeapFrog && rd.has("schedule", "mu")) {
    rd.error("schedule", "mu", "only applies to the averaged_leap_frog preset");
  }
  if (s.preset == Preset::RDA && (rd.has("schedule", "step") || rd.has("schedule", "step_scale"))) {
    rd.error("schedule", "step", "the rda preset fixes s = 1");
  }
  if (!(s.rda_c > 0)) rd.error("schedule", "rda_c", "must be positive");
  if (!(s.mu >= 0 && s.mu <= 1)) rd.error("schedule", "mu", "must lie in [0, 1]");

  // Feasibility of the step sequence itself.
  if (s.step_kind == "list" && s.step_values.empty()) return;
  const auto seq = make_steps(s);
  const std::string key = s.step_kind == "list" ? "step_values" : (s.step_kind == "power" ? "step_exponent" : "step_scale");
  for (const auto& msg : seq.problems()) rd.error("schedule", msg.find("scale") != std::string::npos ? "step_scale" : key, msg);
}

void parse_run(Reader& rd, ExperimentConfig& cfg) {
  RunSection& r = cfg.run;
  rd.number("run", "iterations", r.iterations);
  if (r.iterations < 1) rd.error("run", "iterations", "must be >= 1");
  if (auto v = rd.word("run", "mode")) {
    if (*v == "exact") r.stochastic = false;
    else if (*v == "stochastic") r.stochastic = true;
    else rd.error("run", "mode", "expected exact or stochastic, got '" + *v + "'");
  }
  rd.number("run", "batch_size", r.batch_size);
  if (r.batch_size < 1) rd.error("run", "batch_size", "must be >= 1");
  if (!r.stochastic && rd.has("run", "batch_size")) rd.error("run", "batch_size", "only applies to mode = stochastic");
  if (const Entry* e = rd.find("run", "seeds")) {
    for (const auto& tok : split_list(e->value)) {
      long long v = 0;
      if (!parse_int(tok, v) || v < 0) {
        rd.error("run", "seeds", "not a non-negative integer: '" + tok + "'");
        continue;
      }
      r.seeds.push_back(static_cast<std::uint64_t>(v));
    }
  }
  if (r.stochastic && r.seeds.empty()) rd.error("run", "seeds", "stochastic mode needs at least one seed");
  if (r.seeds.empty()) r.seeds.push_back(0);
  {
    auto sorted = r.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) rd.error("run", "seeds", "duplicate seed");
  }
  rd.number("run", "stride", r.stride);
  if (r.stride < 1) rd.error("run", "stride", "must be >= 1");
  rd.number("run", "reference_tolerance", r.reference_tolerance);
  if (!(r.reference_tolerance > 0)) rd.error("run", "reference_tolerance", "must be positive");
  rd.number("run", "reference_factor", r.reference_factor);
  if (r.reference_factor < 10) rd.error("run", "reference_factor", "must be >= 10");
}

void parse_output(Reader& rd, ExperimentConfig& cfg) {
  if (auto v = rd.word("output", "dir")) cfg.output.dir = *v;
  if (auto v = rd.word("output", "name")) {
    if (v->find_first_of("/\\") != std::string::npos) rd.error("output", "name", "must not contain path separators");
    cfg.output.name = *v;
  }
  cfg.output.record_time = rd.boolean("output", "record_time", false);
}

/// Checks that need the materialized problem: dimensions, labels, batch
/// size and a valid start point.
void validate_built(Reader& rd, const ExperimentConfig& cfg, std::vector<std::string>& errors) {
  try {
    ExperimentConfig full = cfg;
    full.run.stochastic = false;
    const Eigen::Index rows = make_problem(full).rows();
    if (cfg.run.stochastic && cfg.run.batch_size > rows) {
      rd.error("run", "batch_size", "exceeds the " + std::to_string(rows) + " data rows");
      return;
    }
    const auto p = make_problem(cfg);
    const auto sched = make_schedule(cfg.schedule);
    (void)init(p, sched);
  } catch (const Error& e) {
    errors.push_back(std::string("[problem] ") + e.what());
  }
}

}  // namespace

Schedule<double> make_schedule(const ScheduleSection& s, std::optional<Preset> preset) {
  PresetParams<double> params;
  params.step = make_steps(s);
  params.rda_c = s.rda_c;
  params.mu = s.mu;
  return schedule_preset(preset.value_or(s.preset), params);
}

CompositeProblem<double> make_problem(const ExperimentConfig& cfg) {
  const ProblemSection& ps = cfg.problem;
  ProblemDescription<double> d;
  d.loss = ps.loss;
  d.mirror = ps.mirror;
  d.batch_size = cfg.run.stochastic ? cfg.run.batch_size : 0;

  Eigen::Index dim = 0;
  switch (ps.source) {
    case DataSource::Synthetic:
      d.synthetic = ps.recipe;
      dim = ps.recipe.cols;
      break;
    case DataSource::Inline:
      d.A = ps.A;
      d.b = ps.b;
      d.c = ps.c;
      dim = ps.loss == LossKind::Linear ? (ps.c ? ps.c->size() : 0) : (ps.A ? ps.A->cols() : 0);
      break;
    case DataSource::Files:
      if (ps.loss == LossKind::Linear) {
        d.c = read_vector(ps.c_file);
        dim = d.c->size();
      } else {
        d.A = read_matrix(ps.A_file);
        d.b = read_vector(ps.b_file);
        dim = d.A->cols();
      }
      break;
  }

  switch (ps.regularizer) {
    case RegularizerKind::L1: d.regularizer = Regularizer<double>::l1(ps.lambda); break;
    case RegularizerKind::Box: {
      if ((ps.box_lo.size() != 1 && static_cast<Eigen::Index>(ps.box_lo.size()) != dim) ||
          (ps.box_hi.size() != 1 && static_cast<Eigen::Index>(ps.box_hi.size()) != dim)) {
        throw DimensionError("box_lo and box_hi need 1 or " + std::to_string(dim) + " entries");
      }
      d.regularizer = Regularizer<double>::box(broadcast(ps.box_lo, dim), broadcast(ps.box_hi, dim));
      break;
    }
    case RegularizerKind::Simplex: d.regularizer = Regularizer<double>::simplex(); break;
    case RegularizerKind::L2Ball: d.regularizer = Regularizer<double>::l2_ball(ps.radius); break;
    case RegularizerKind::Zero: d.regularizer = Regularizer<double>::zero(); break;
  }
  return build_problem(d);
}

ConfigResult parse_config(const std::string& text, const fs::path& base_dir) {
  ConfigResult result;
  auto& errors = result.errors;
  std::map<std::string, Section> sections;
  sections[""];

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string current;
  bool current_valid = true;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) + ": malformed section header '" + line + "'");
        current_valid = false;
        continue;
      }
      current = trim(line.substr(1, line.size() - 2));
      current_valid = std::find(kSections.begin(), kSections.end(), current) != kSections.end();
      if (!current_valid) {
        errors.push_back("line " + std::to_string(lineno) + ": unknown section [" + current + "]");
      } else if (sections.count(current)) {
        errors.push_back("line " + std::to_string(lineno) + ": duplicate section [" + current + "]");
      }
      if (current_valid) sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": missing key before '='");
      continue;
    }
    if (!current_valid) continue;
    auto& sec = sections[current];
    if (sec.count(key)) {
      errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      continue;
    }
    sec[key] = Entry{value, lineno, false};
  }

  ExperimentConfig cfg;
  Reader rd(sections, errors);
  if (const Entry* e = rd.find("", "spec_version")) {
    long long v = 0;
    if (!parse_int(e->value, v) || v != 1) rd.error("", "spec_version", "unsupported version '" + e->value + "' (expected 1)");
  } else {
    errors.push_back("missing 'spec_version = 1' header");
  }
  for (const auto& name : {"problem", "schedule", "run"}) {
    if (!sections.count(name)) errors.push_back(std::string("missing section [") + name + "]");
  }

  parse_problem(rd, cfg, base_dir);
  parse_schedule(rd, cfg);
  parse_run(rd, cfg);
  parse_output(rd, cfg);
  rd.report_unused();

  {
    std::ostringstream canon;
    for (const auto& [key, e] : sections["problem"]) canon << key << '=' << e.value << '\n';
    cfg.problem.canonical = canon.str();
  }

  if (errors.empty()) validate_built(rd, cfg, errors);
  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

ConfigResult load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    return ConfigResult{std::nullopt, {e.what()}};
  }
  return parse_config(text, path.parent_path());
}

std::uint64_t problem_hash(const ExperimentConfig& cfg) {
  std::string blob = cfg.problem.canonical;
  if (cfg.problem.source == DataSource::Files) {
    for (const auto* f : {&cfg.problem.A_file, &cfg.problem.b_file, &cfg.problem.c_file}) {
      if (!f->empty()) blob += read_file(*f);
    }
  }
  blob += "reference_tolerance=" + format_double(cfg.run.reference_tolerance) + '\n';
  blob += "reference_budget=" + std::to_string(cfg.run.reference_factor * cfg.run.iterations) + '\n';
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : blob) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace xrda::harness
