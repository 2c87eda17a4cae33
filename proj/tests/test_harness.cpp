#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "test_support.hpp"
#include "xrda/harness/experiment.hpp"
#include "xrda/harness/text_io.hpp"
#include "xrda/harness/trace_csv.hpp"

namespace xrda::testing {
namespace {

namespace fs = std::filesystem;
using namespace xrda::harness;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("xrda_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

const char* kMinimal = R"(spec_version = 1
[problem]
loss = logistic
regularizer = l1
lambda = 0.1
rows = 30
cols = 8
sparsity = 3
noise = 0.5
seed = 7

[schedule]
preset = rda

[run]
iterations = 1000
)";

std::string with_output(const std::string& text, const fs::path& dir, const std::string& extra = "") {
  return text + extra + "\n[output]\ndir = " + dir.string() + "\n";
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

ExperimentConfig parse_ok(const std::string& text) {
  auto res = parse_config(text);
  std::string all;
  for (const auto& e : res.errors) all += e + "\n";
  EXPECT_TRUE(res.ok()) << all;
  return res.config.value_or(ExperimentConfig{});
}

TEST(Config, MinimalParses) {
  const auto cfg = parse_ok(kMinimal);
  EXPECT_EQ(cfg.problem.loss, LossKind::Logistic);
  EXPECT_EQ(cfg.problem.regularizer, RegularizerKind::L1);
  EXPECT_EQ(cfg.problem.lambda, 0.1);
  EXPECT_EQ(cfg.schedule.preset, Preset::RDA);
  EXPECT_EQ(cfg.run.iterations, 1000);
  EXPECT_FALSE(cfg.run.stochastic);
  EXPECT_EQ(cfg.run.seeds, std::vector<std::uint64_t>{0});
  EXPECT_FALSE(cfg.output.record_time);
}

TEST(Config, IncreasingStepsRejected) {
  auto bad = std::string(kMinimal);
  bad.replace(bad.find("preset = rda"), 12, "preset = leap_frog\nstep = list\nstep_values = 0.5, 1.0");
  const auto res = parse_config(bad);
  EXPECT_FALSE(res.ok());
  EXPECT_TRUE(mentions(res.errors, "s must be non-increasing"));
  EXPECT_TRUE(mentions(res.errors, "step_values"));
}

TEST(Config, UnknownKeyNamed) {
  const auto res = parse_config(std::string(kMinimal) + "warp_factor = 9\n");
  EXPECT_FALSE(res.ok());
  EXPECT_TRUE(mentions(res.errors, "unknown key 'warp_factor'"));
}

TEST(Config, SyntaxErrorHasLineNumber) {
  const auto res = parse_config(std::string(kMinimal) + "this line has no equals sign\n");
  ASSERT_FALSE(res.ok());
  EXPECT_TRUE(mentions(res.errors, "line 17:"));
}

TEST(Config, CollectsEveryError) {
  const std::string text = R"(spec_version = 2
[problem]
loss = hinge
regularizer = l1
rows = 0
cols = 8
[schedule]
preset = rda
mu = 3
[run]
iterations = 0
mode = stochastic
stride = -1
[bogus]
)";
  const auto res = parse_config(text);
  ASSERT_FALSE(res.ok());
  for (const char* needle : {"spec_version", "loss", "lambda", "rows", "mu", "iterations", "seeds", "stride",
                             "unknown section [bogus]"}) {
    EXPECT_TRUE(mentions(res.errors, needle)) << needle;
  }
  EXPECT_GE(res.errors.size(), 9u);
}

TEST(Config, RegistryAndDataChecks) {
  auto text = std::string(kMinimal);
  text.replace(text.find("regularizer = l1\nlambda = 0.1"), 28, "regularizer = simplex\nmirror = euclidean");
  EXPECT_TRUE(mentions(parse_config(text).errors, "unsupported"));

  const auto missing = parse_config("spec_version = 1\n[problem]\nloss = lad\ndata = inline\n[schedule]\npreset = rda\n[run]\n");
  EXPECT_TRUE(mentions(missing.errors, "[problem] A"));
  EXPECT_TRUE(mentions(missing.errors, "[problem] b"));

  const auto dims = parse_config(
      "spec_version = 1\n[problem]\nloss = lad\ndata = inline\nA = 1 0; 0 1\nb = 1, 2, 3\n[schedule]\npreset = rda\n[run]\n");
  EXPECT_TRUE(mentions(dims.errors, "targets b has 3 entries"));

  const auto entropy_zero = parse_config(
      "spec_version = 1\n[problem]\nloss = linear\nmirror = entropy\ndata = inline\nc = 1, 2\n[schedule]\npreset = rda\n[run]\n");
  EXPECT_TRUE(mentions(entropy_zero.errors, "simplex"));

  const auto batch = parse_config(std::string(kMinimal) + "mode = stochastic\nseeds = 1\nbatch_size = 31\n");
  EXPECT_TRUE(mentions(batch.errors, "batch_size"));
}

TEST(Config, InlineAndListValues) {
  const auto cfg = parse_ok(R"(spec_version = 1
[problem]
loss = lad
regularizer = box
box_lo = -1, -2
box_hi = 1
data = inline
A = 1 0; 0 1; 1 1   # three rows
b = 1 2 3
[schedule]
preset = averaged_leap_frog
step = power
step_scale = 0.5
step_exponent = 0.75
mu = 0.25
[run]
iterations = 10
mode = stochastic
batch_size = 2
seeds = 4, 5
[output]
record_time = true
)");
  ASSERT_TRUE(cfg.problem.A.has_value());
  EXPECT_EQ(cfg.problem.A->rows(), 3);
  EXPECT_EQ((*cfg.problem.A)(2, 1), 1.0);
  EXPECT_EQ(cfg.run.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_TRUE(cfg.output.record_time);
  const auto p = make_problem(cfg);
  EXPECT_EQ(p.batch_size, 2);
  const auto sched = make_schedule(cfg.schedule);
  EXPECT_EQ(sched.s(16), 0.5 * std::pow(16.0, -0.75));
  EXPECT_EQ(sched.t.mu, 0.25);
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"lad_l1_rda.ini", "linear_simplex_entropy.ini", "acceptance/lad_l1.ini",
                           "acceptance/logistic_l1.ini", "acceptance/lad_l1_rate.ini",
                           "acceptance/logistic_l1_stochastic.ini", "acceptance/sparse_lad.ini"}) {
    const auto res = load_config(fs::path(XRDA_SOURCE_DIR) / "configs" / name);
    std::string all;
    for (const auto& e : res.errors) all += e + "\n";
    EXPECT_TRUE(res.ok()) << name << "\n" << all;
  }
}

TEST(TextIo, DoubleFormatRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 10000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(k % 40) - 20);
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST_F(TempDir, MatrixRoundTrip) {
  Matrix<double> A(3, 2);
  A << 1, -2.5, 1e-300, 3.14159, 0.1, 7;
  write_matrix(dir_ / "A.txt", A);
  EXPECT_EQ(read_matrix(dir_ / "A.txt"), A);
  write_vector(dir_ / "b.txt", vec({1, 2, 3}));
  EXPECT_EQ(read_vector(dir_ / "b.txt"), vec({1, 2, 3}));
  std::ofstream(dir_ / "bad.txt") << "1 2\n3\n";
  EXPECT_THROW(read_matrix(dir_ / "bad.txt"), IoError);
}

Trace<double> sample_trace() {
  Trace<double> t;
  for (int n = 1; n <= 5; ++n) {
    TraceRow<double> r;
    r.n = n * 10;
    r.f_x = 1.0 / 3.0 + n;
    r.f_avg = std::sqrt(2.0) * n;
    r.gap_best = 1e-17 * n;
    r.gap_avg = std::numeric_limits<double>::quiet_NaN();
    r.bound = 2.0 / n;
    r.backward_step = 0.1 * n;
    r.nnz = n;
    r.elapsed_s = 0.0;
    t.rows.push_back(r);
  }
  return t;
}

TEST_F(TempDir, TraceCsvRoundTrip) {
  const auto t = sample_trace();
  const auto path = dir_ / "t.csv";
  write_trace_csv(t, path);
  const auto text = read_file(path);
  EXPECT_EQ(text.substr(0, text.find('\n')), kTraceHeader);
  const auto back = read_trace_csv(path);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].n, t.rows[i].n);
    EXPECT_EQ(back.rows[i].f_x, t.rows[i].f_x);
    EXPECT_EQ(back.rows[i].f_avg, t.rows[i].f_avg);
    EXPECT_EQ(back.rows[i].gap_best, t.rows[i].gap_best);
    EXPECT_TRUE(std::isnan(back.rows[i].gap_avg));
    EXPECT_EQ(back.rows[i].bound, t.rows[i].bound);
    EXPECT_EQ(back.rows[i].backward_step, t.rows[i].backward_step);
    EXPECT_EQ(back.rows[i].nnz, t.rows[i].nnz);
  }
}

TEST_F(TempDir, TraceCsvOverwritesAtomically) {
  const auto path = dir_ / "t.csv";
  std::ofstream(path) << "stale contents that are longer than nothing\n";
  Trace<double> empty;
  write_trace_csv(empty, path);
  EXPECT_EQ(read_file(path), std::string(kTraceHeader) + "\n");
  for (const auto& e : fs::directory_iterator(dir_)) EXPECT_EQ(e.path().filename(), "t.csv");
}

TEST_F(TempDir, TraceCsvUnwritableDirectory) {
  const auto path = dir_ / "missing" / "t.csv";
  try {
    write_trace_csv(sample_trace(), path);
    FAIL() << "write into a missing directory succeeded";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
}

TEST_F(TempDir, ExactSeedsGiveIdenticalTraces) {
  const auto cfg = parse_ok(with_output(kMinimal, dir_, "seeds = 1, 2\nstride = 100\n"));
  const auto rep = run_experiment(cfg);
  ASSERT_EQ(rep.traces.size(), 2u);
  EXPECT_TRUE(rep.halted.empty());
  EXPECT_EQ(read_file(rep.traces[0]), read_file(rep.traces[1]));
  EXPECT_EQ(rep.traces[0].filename(), "trace_seed1.csv");
  const auto t = read_trace_csv(rep.traces[0]);
  ASSERT_EQ(t.rows.size(), 10u);
  const auto text = read_file(rep.traces[0]);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
}

TEST_F(TempDir, StochasticSeedsDifferAndReproduce) {
  const auto cfg = parse_ok(with_output(kMinimal, dir_, "mode = stochastic\nseeds = 1, 2\nstride = 100\n"));
  const auto a = run_experiment(cfg);
  ASSERT_EQ(a.traces.size(), 2u);
  const auto s1 = read_file(a.traces[0]);
  const auto s2 = read_file(a.traces[1]);
  EXPECT_NE(s1, s2);
  RunOverrides ov;
  ov.jobs = 2;
  const auto b = run_experiment(cfg, ov);
  EXPECT_EQ(read_file(b.traces[0]), s1);
  EXPECT_EQ(read_file(b.traces[1]), s2);
}

TEST_F(TempDir, ReferenceIsCachedByProblemHash) {
  const auto cfg = parse_ok(with_output(kMinimal, dir_));
  const auto p = make_problem(cfg);
  const auto first = cached_reference(cfg, p, dir_);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir_)) files.push_back(e.path());
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].filename().string().rfind("reference_", 0), 0u);
  const auto second = cached_reference(cfg, p, dir_);
  EXPECT_EQ(first.f_star, second.f_star);
  EXPECT_EQ(first.x_star, second.x_star);

  auto other = cfg;
  other.problem.canonical += "noise=0.6\n";
  EXPECT_NE(problem_hash(cfg), problem_hash(other));
  auto budget = cfg;
  budget.run.iterations *= 2;
  EXPECT_NE(problem_hash(cfg), problem_hash(budget));
}

TEST_F(TempDir, StrideOverride) {
  const auto cfg = parse_ok(with_output(kMinimal, dir_));
  RunOverrides ov;
  ov.stride = 250;
  const auto rep = run_experiment(cfg, ov);
  EXPECT_EQ(read_trace_csv(rep.traces[0]).rows.size(), 4u);
}

fs::path lad_rda_trace(const fs::path& dir) {
  auto text = std::string(kMinimal);
  text.replace(text.find("logistic"), 8, "lad");
  const auto cfg = parse_ok(with_output(text, dir, "stride = 10\n"));
  return run_experiment(cfg).traces.at(0);
}

TEST_F(TempDir, CheckBoundPassesOnDeterministicRun) {
  const auto rep = check_bound({lad_rda_trace(dir_)}, true);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.rows_checked, 100);
  EXPECT_EQ(rep.lines.size(), 100u);
}

TEST_F(TempDir, CheckBoundFlagsCorruptedRow) {
  const auto path = lad_rda_trace(dir_);
  auto t = read_trace_csv(path);
  t.rows[42].gap_best = 10 * t.rows[42].bound;
  write_trace_csv(t, path);
  const auto rep = check_bound({path}, true);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.violations, 1);
  EXPECT_NE(rep.lines[42].find("FAIL"), std::string::npos);
  EXPECT_NE(rep.lines[42].find("n=430"), std::string::npos);
}

TEST_F(TempDir, CheckBoundUsageErrors) {
  EXPECT_THROW(check_bound({}, true), ConfigError);
  auto text = std::string(kMinimal);
  text.replace(text.find("logistic"), 8, "lad");
  const auto cfg = parse_ok(with_output(text, dir_, "stride = 100\n"));
  RunOverrides ov;
  ov.unsafe = true;
  const auto rep = run_experiment(cfg, ov);
  EXPECT_THROW(check_bound(rep.traces, true), ConfigError);
}

TEST_F(TempDir, CheckBoundStochasticAggregate) {
  const auto cfg = parse_ok(with_output(kMinimal, dir_, "mode = stochastic\nseeds = 1, 2, 3\nstride = 500\n"));
  const auto rep = run_experiment(cfg);
  const auto chk = check_bound(rep.traces, false);
  EXPECT_EQ(chk.rows_checked, 1);
  EXPECT_EQ(chk.lines.size(), 1u);
  EXPECT_TRUE(chk.passed()) << chk.lines[0];
}

const char* kSparse = R"(spec_version = 1
[problem]
loss = lad
regularizer = l1
lambda = 0.1
rows = 60
cols = 30
sparsity = 5
noise = 0.5
seed = 11
[schedule]
preset = leap_frog
step = constant
step_scale = 1
[run]
iterations = 400
stride = 20
)";

TEST_F(TempDir, CompareBackwardSteps) {
  const auto cfg = parse_ok(with_output(kSparse, dir_));
  const auto rep = compare({cfg}, {Preset::ForwardBackward, Preset::LeapFrog});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_GT(rep.rows[1].median_backward_step, rep.rows[0].median_backward_step);
  EXPECT_TRUE(fs::exists(rep.csv_path));
  EXPECT_EQ(std::count(rep.table.begin(), rep.table.end(), '\n'), 3);

  const auto csv = read_file(rep.csv_path);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,final_gap,final_nnz,median_backward_step");

  const auto one = compare({cfg}, {});
  EXPECT_EQ(one.rows.size(), 1u);
  EXPECT_EQ(one.rows[0].label, "leap_frog");
}

TEST_F(TempDir, RdaBackwardStepGrowsLikeSqrtN) {
  auto text = std::string(kSparse);
  const std::string lf_block = "preset = leap_frog\nstep = constant\nstep_scale = 1";
  text.replace(text.find(lf_block), lf_block.size(), "preset = rda");
  text.replace(text.find("iterations = 400"), 16, "iterations = 1600");
  const auto cfg = parse_ok(with_output(text, dir_));
  const auto t = read_trace_csv(run_experiment(cfg).traces.at(0));
  const auto at = [&](Eigen::Index n) {
    for (const auto& r : t.rows)
      if (r.n == n) return r.backward_step;
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (Eigen::Index n : {100, 400, 1600}) EXPECT_NEAR(at(n), n / std::sqrt(n + 1.0), 1e-12);
  EXPECT_NEAR(at(1600) / at(400), 2.0, 5e-3);

  auto lf = cfg;
  lf.schedule.preset = Preset::LeapFrog;
  lf.schedule.step_kind = "constant";
  const auto rep = compare({lf}, {Preset::RDA, Preset::LeapFrog});
  EXPECT_LT(rep.rows[0].median_backward_step, rep.rows[1].median_backward_step);
}

TEST_F(TempDir, CompareRejectsMismatchedProblems) {
  const auto a = parse_ok(with_output(kSparse, dir_));
  auto text = std::string(kSparse);
  text.replace(text.find("cols = 30"), 9, "cols = 31");
  const auto b = parse_ok(with_output(text, dir_));
  EXPECT_THROW(compare({a, b}, {}), DimensionError);
  auto c_text = std::string(kSparse);
  c_text.replace(c_text.find("seed = 11"), 9, "seed = 12");
  EXPECT_THROW(compare({a, parse_ok(with_output(c_text, dir_))}, {}), ConfigError);
  auto d_text = std::string(kSparse);
  d_text.replace(d_text.find("preset = leap_frog"), 18, "preset = constant_backward");
  const auto rep = compare({a, parse_ok(with_output(d_text, dir_))}, {});
  EXPECT_EQ(rep.rows.size(), 2u);
}

TEST_F(TempDir, GeneratedFilesReproduceTheProblem) {
  const auto cfg = parse_ok(with_output(kSparse, dir_));
  const auto files = generate_problem(cfg, dir_ / "data");
  EXPECT_EQ(files.size(), 3u);
  const auto from_files = parse_ok(
      with_output("spec_version = 1\n[problem]\nloss = lad\nregularizer = l1\nlambda = 0.1\ndata = files\nA_file = " +
                      (dir_ / "data" / "A.txt").string() + "\nb_file = " + (dir_ / "data" / "b.txt").string() +
                      "\n[schedule]\npreset = rda\n[run]\niterations = 10\n",
                  dir_));
  const auto p = make_problem(cfg);
  const auto q = make_problem(from_files);
  EXPECT_EQ(p.A, q.A);
  EXPECT_EQ(p.b, q.b);
  EXPECT_EQ(read_vector(dir_ / "data" / "x_true.txt"), *p.planted);
}

int cli(const std::string& args) {
  const std::string cmd = std::string(XRDA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST_F(TempDir, CliExitCodes) {
  const auto good = dir_ / "good.ini";
  {
    auto text = std::string(kMinimal);
    text.replace(text.find("logistic"), 8, "lad");
    std::ofstream(good) << with_output(text, dir_ / "out", "stride = 100\n");
  }
  const auto bad = dir_ / "bad.ini";
  std::ofstream(bad) << std::string(kMinimal) << "nonsense = 1\n";

  EXPECT_EQ(cli("--config " + good.string() + " run"), kExitOk);
  EXPECT_EQ(cli("--config " + bad.string() + " run"), kExitValidation);
  EXPECT_EQ(cli("--config " + (dir_ / "absent.ini").string() + " run"), kExitValidation);
  EXPECT_EQ(cli("run"), kExitValidation);
  EXPECT_EQ(cli("--config " + good.string() + " --stride 50 --out " + (dir_ / "o2").string() + " run"), kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "o2" / "trace_seed0.csv"));

  const auto trace = dir_ / "out" / "trace_seed0.csv";
  EXPECT_EQ(cli("check-bound " + trace.string()), kExitOk);
  auto t = read_trace_csv(trace);
  t.rows[3].gap_best = 10 * t.rows[3].bound;
  write_trace_csv(t, trace);
  EXPECT_EQ(cli("check-bound " + trace.string()), kExitBoundFailure);
  EXPECT_EQ(cli("check-bound"), kExitValidation);

  EXPECT_EQ(cli("--config " + good.string() + " --unsafe --out " + (dir_ / "u").string() + " run"), kExitOk);
  EXPECT_EQ(cli("check-bound " + (dir_ / "u" / "trace_seed0.csv").string()), kExitValidation);

  EXPECT_EQ(cli("--config " + good.string() + " compare --presets forward_backward,leap_frog"), kExitOk);
  EXPECT_EQ(cli("--config " + good.string() + " compare --presets nope"), kExitValidation);
  EXPECT_EQ(cli("--config " + good.string() + " --out " + (dir_ / "gen").string() + " gen-problem"), kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "gen" / "A.txt"));
}

}  // namespace
}  // namespace xrda::testing
