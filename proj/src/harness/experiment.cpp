#include "xrda/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>

#include "xrda/harness/text_io.hpp"
#include "xrda/harness/trace_csv.hpp"

namespace xrda::harness {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCacheMagic = "xrda-reference 1";

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<ReferenceSolution<double>> read_cache(const fs::path& path, Eigen::Index dim) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kCacheMagic) return std::nullopt;
    ReferenceSolution<double> ref;
    std::string key;
    int converged = 0;
    in >> key >> ref.f_star;
    if (key != "f_star") return std::nullopt;
    in >> key >> ref.certified_gap;
    if (key != "certified_gap") return std::nullopt;
    in >> key >> converged;
    if (key != "converged") return std::nullopt;
    in >> key >> ref.iterations;
    if (key != "iterations") return std::nullopt;
    in >> key;
    if (key != "x_star" || !in) return std::nullopt;
    Vector<double> x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      std::string tok;
      if (!(in >> tok)) return std::nullopt;
      x[i] = std::strtod(tok.c_str(), nullptr);
    }
    ref.converged = converged != 0;
    ref.x_star = PrimalPoint<double>(std::move(x));
    return ref;
  } catch (const IoError&) {
    return std::nullopt;
  }
}

void write_cache(const fs::path& path, const ReferenceSolution<double>& ref) {
  std::string out = kCacheMagic;
  out += "\nf_star " + format_double(ref.f_star);
  out += "\ncertified_gap " + format_double(ref.certified_gap);
  out += "\nconverged " + std::to_string(ref.converged ? 1 : 0);
  out += "\niterations " + std::to_string(ref.iterations);
  out += "\nx_star";
  for (Eigen::Index i = 0; i < ref.x_star.dim(); ++i) out += ' ' + format_double(ref.x_star[i]);
  out += '\n';
  write_file_atomic(path, out);
}

fs::path output_dir(const ExperimentConfig& cfg, const RunOverrides& ov) {
  fs::path dir = ov.out_dir.value_or(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

RunOptions<double> run_options(const ExperimentConfig& cfg, const RunOverrides& ov, std::uint64_t seed,
                               const ReferenceSolution<double>& ref) {
  RunOptions<double> o;
  o.iterations = cfg.run.iterations;
  o.stride = ov.stride.value_or(cfg.run.stride);
  o.stochastic = cfg.run.stochastic;
  o.seed = seed;
  o.step.enforce_schedule = !ov.unsafe;
  o.record_time = cfg.output.record_time;
  o.reference = ref;
  return o;
}

struct SeedOutcome {
  fs::path path;
  std::string halted;
};

SeedOutcome run_seed(const ExperimentConfig& cfg, const RunOverrides& ov, const CompositeProblem<double>& p,
                     const Schedule<double>& sched, const ReferenceSolution<double>& ref, std::uint64_t seed,
                     const fs::path& dir) {
  SeedOutcome out;
  out.path = dir / (cfg.output.name + "_seed" + std::to_string(seed) + ".csv");
  try {
    auto [state, trace] = run(p, sched, run_options(cfg, ov, seed, ref));
    // Outside the schedule constraints the theorem says nothing.
    if (ov.unsafe) {
      for (auto& r : trace.rows) r.bound = std::numeric_limits<double>::quiet_NaN();
    }
    write_trace_csv(trace, out.path);
  } catch (const ScheduleViolation& e) {
    out.halted = "seed " + std::to_string(seed) + ": " + e.what();
    out.path.clear();
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

bool same_problem(const CompositeProblem<double>& a, const CompositeProblem<double>& b) {
  return a.loss == b.loss && a.mirror.kind == b.mirror.kind && a.G.kind() == b.G.kind() &&
         a.G.lambda() == b.G.lambda() && a.A == b.A && a.b == b.b && a.c == b.c;
}

}  // namespace

ReferenceSolution<double> cached_reference(const ExperimentConfig& cfg, const CompositeProblem<double>& p,
                                           const fs::path& dir) {
  const fs::path path = dir / ("reference_" + hex(problem_hash(cfg)) + ".txt");
  if (auto hit = read_cache(path, p.dim())) return *hit;
  ReferenceOptions<double> opts;
  opts.tolerance = cfg.run.reference_tolerance;
  opts.budget = cfg.run.reference_factor * cfg.run.iterations;
  auto ref = reference_optimum(p, opts);
  write_cache(path, ref);
  // Re-read so a fresh solve and a cache hit yield bit-identical values.
  if (auto back = read_cache(path, p.dim())) return *back;
  return ref;
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov) {
  const auto p = make_problem(cfg);
  const auto sched = make_schedule(cfg.schedule);
  const fs::path dir = output_dir(cfg, ov);

  RunReport report;
  report.reference = cached_reference(cfg, p, dir);

  const auto& seeds = cfg.run.seeds;
  std::vector<SeedOutcome> outcomes(seeds.size());
  const unsigned jobs = std::max(1u, ov.jobs);
  for (std::size_t start = 0; start < seeds.size(); start += jobs) {
    std::vector<std::future<SeedOutcome>> batch;
    const std::size_t end = std::min(seeds.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, run_seed, std::cref(cfg),
                                 std::cref(ov), std::cref(p), std::cref(sched), std::cref(report.reference), seeds[i],
                                 std::cref(dir)));
    }
    for (std::size_t i = start; i < end; ++i) outcomes[i] = batch[i - start].get();
  }
  for (auto& o : outcomes) {
    if (!o.halted.empty()) report.halted.push_back(std::move(o.halted));
    else report.traces.push_back(std::move(o.path));
  }
  return report;
}

BoundCheckReport check_bound(const std::vector<fs::path>& traces, bool strict, double slack) {
  if (traces.empty()) throw ConfigError("check-bound: no trace files given");
  std::vector<Trace<double>> loaded;
  for (const auto& path : traces) {
    auto t = read_trace_csv(path);
    if (t.rows.empty()) throw ConfigError("check-bound: " + path.string() + " has no rows");
    for (const auto& r : t.rows) {
      if (std::isnan(r.bound)) {
        throw ConfigError("check-bound: " + path.string() + " has no bound column (unsafe run or no reference)");
      }
    }
    loaded.push_back(std::move(t));
  }

  BoundCheckReport rep;
  char buf[256];
  if (strict) {
    for (std::size_t k = 0; k < loaded.size(); ++k) {
      for (const auto& r : loaded[k].rows) {
        const bool ok = r.gap_best <= r.bound + slack && r.gap_avg <= r.bound + slack;
        std::snprintf(buf, sizeof buf, "%s n=%lld gap_best=%.6e gap_avg=%.6e bound=%.6e %s",
                      traces[k].filename().string().c_str(), static_cast<long long>(r.n), r.gap_best, r.gap_avg,
                      r.bound, ok ? "PASS" : "FAIL");
        rep.lines.emplace_back(buf);
        ++rep.rows_checked;
        if (!ok) ++rep.violations;
      }
    }
    return rep;
  }

  const Eigen::Index n = loaded.front().rows.back().n;
  double gap = 0.0;
  double bound = 0.0;
  for (std::size_t k = 0; k < loaded.size(); ++k) {
    const auto& last = loaded[k].rows.back();
    if (last.n != n) {
      throw ConfigError("check-bound: traces end at different n (" + std::to_string(n) + " vs " +
                        std::to_string(last.n) + ")");
    }
    gap += last.gap_best;
    bound += last.bound;
  }
  gap /= static_cast<double>(loaded.size());
  bound /= static_cast<double>(loaded.size());
  const bool ok = gap <= 1.10 * bound + slack;
  std::snprintf(buf, sizeof buf, "seeds=%zu n=%lld mean_gap_best=%.6e 1.10*bound=%.6e %s", loaded.size(),
                static_cast<long long>(n), gap, 1.10 * bound, ok ? "PASS" : "FAIL");
  rep.lines.emplace_back(buf);
  rep.rows_checked = 1;
  rep.violations = ok ? 0 : 1;
  return rep;
}

CompareReport compare(const std::vector<ExperimentConfig>& cfgs, const std::vector<Preset>& presets,
                      const RunOverrides& ov) {
  if (cfgs.empty()) throw ConfigError("compare: no configs given");
  if (cfgs.size() > 1 && !presets.empty()) throw ConfigError("compare: give either several configs or a preset list");

  const ExperimentConfig& base = cfgs.front();
  const auto p = make_problem(base);
  for (std::size_t k = 1; k < cfgs.size(); ++k) {
    const auto q = make_problem(cfgs[k]);
    if (q.dim() != p.dim() || q.rows() != p.rows()) {
      throw DimensionError("compare: mismatched problem dims (" + std::to_string(p.rows()) + "x" +
                           std::to_string(p.dim()) + " vs " + std::to_string(q.rows()) + "x" +
                           std::to_string(q.dim()) + ")");
    }
    if (!same_problem(p, q)) throw ConfigError("compare: configs describe different problems");
  }

  ExperimentConfig ref_cfg = base;
  for (const auto& c : cfgs) ref_cfg.run.iterations = std::max(ref_cfg.run.iterations, c.run.iterations);
  const fs::path dir = output_dir(base, ov);
  const auto ref = cached_reference(ref_cfg, p, dir);

  struct Entry {
    std::string label;
    const ExperimentConfig* cfg;
    Schedule<double> sched;
  };
  std::vector<Entry> entries;
  if (cfgs.size() == 1) {
    const std::vector<Preset> list = presets.empty() ? std::vector<Preset>{base.schedule.preset} : presets;
    for (Preset pr : list) entries.push_back({to_string(pr), &base, make_schedule(base.schedule, pr)});
  } else {
    for (const auto& c : cfgs) {
      entries.push_back({c.output.name + ":" + to_string(c.schedule.preset), &c, make_schedule(c.schedule)});
    }
  }

  CompareReport rep;
  for (const auto& e : entries) {
    const auto opts = run_options(*e.cfg, ov, e.cfg->run.seeds.front(), ref);
    const auto [state, trace] = run(p, e.sched, opts);
    std::vector<double> steps;
    for (const auto& r : trace.rows) steps.push_back(r.backward_step);
    CompareRow row;
    row.label = e.label;
    row.final_gap = state.best_f - ref.f_star;
    row.final_nnz = nnz(state.x);
    row.median_backward_step = median(steps);
    rep.rows.push_back(row);
  }

  std::string csv = "label,final_gap,final_nnz,median_backward_step\n";
  for (const auto& r : rep.rows) {
    csv += r.label + "," + format_double(r.final_gap) + "," + std::to_string(r.final_nnz) + "," +
           format_double(r.median_backward_step) + "\n";
  }
  rep.csv_path = dir / (base.output.name + "_compare.csv");
  write_file_atomic(rep.csv_path, csv);

  std::size_t width = 6;
  for (const auto& r : rep.rows) width = std::max(width, r.label.size());
  std::ostringstream t;
  t << std::left << std::setw(static_cast<int>(width)) << "preset" << "  " << std::right << std::setw(14) << "final_gap"
    << "  " << std::setw(9) << "final_nnz" << "  " << std::setw(20) << "median_backward_step" << '\n';
  for (const auto& r : rep.rows) {
    t << std::left << std::setw(static_cast<int>(width)) << r.label << "  " << std::right << std::setw(14)
      << std::scientific << std::setprecision(6) << r.final_gap << "  " << std::setw(9) << r.final_nnz << "  "
      << std::setw(20) << r.median_backward_step << '\n';
  }
  rep.table = t.str();
  return rep;
}

std::vector<fs::path> generate_problem(const ExperimentConfig& cfg, const fs::path& dir) {
  if (cfg.problem.source != DataSource::Synthetic) throw ConfigError("gen-problem: [problem] data must be synthetic");
  const auto p = make_problem(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  std::vector<fs::path> out;
  if (p.loss == LossKind::Linear) {
    out.push_back(dir / "c.txt");
    write_vector(out.back(), p.c);
  } else {
    out.push_back(dir / "A.txt");
    write_matrix(out.back(), p.A);
    out.push_back(dir / "b.txt");
    write_vector(out.back(), p.b);
    if (p.planted) {
      out.push_back(dir / "x_true.txt");
      write_vector(out.back(), *p.planted);
    }
  }
  return out;
}

}  // namespace xrda::harness
