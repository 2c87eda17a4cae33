#include "xrda/harness/trace_csv.hpp"

#include <cstdlib>
#include <sstream>

#include "xrda/errors.hpp"
#include "xrda/harness/text_io.hpp"

namespace xrda::harness {

namespace fs = std::filesystem;

std::string format_trace_csv(const Trace<double>& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : trace.rows) {
    out += std::to_string(r.n);
    for (double v : {r.f_x, r.f_avg, r.gap_best, r.gap_avg, r.bound, r.backward_step}) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += std::to_string(r.nnz);
    out += ',';
    out += format_double(r.elapsed_s);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const Trace<double>& trace, const fs::path& path) {
  write_file_atomic(path, format_trace_csv(trace));
}

namespace {

double parse_field(const std::string& tok, const fs::path& path, std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad field '" + tok + "'");
  }
  return v;
}

}  // namespace

Trace<double> read_trace_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw IoError(path.string() + ": missing trace header");
  }
  Trace<double> trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(parse_field(tok, path, lineno));
    if (f.size() != 9) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 9 fields");
    TraceRow<double> r;
    r.n = static_cast<Eigen::Index>(f[0]);
    r.f_x = f[1];
    r.f_avg = f[2];
    r.gap_best = f[3];
    r.gap_avg = f[4];
    r.bound = f[5];
    r.backward_step = f[6];
    r.nnz = static_cast<Eigen::Index>(f[7]);
    r.elapsed_s = f[8];
    if (!trace.rows.empty() && r.n <= trace.rows.back().n) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": rows must increase in n");
    }
    trace.rows.push_back(r);
  }
  return trace;
}

}  // namespace xrda::harness
