#pragma once

#include <filesystem>
#include <string>

#include "xrda/solver.hpp"

namespace xrda::harness {

inline constexpr const char* kTraceHeader = "n,f_x,f_avg,gap_best,gap_avg,bound,backward_step,nnz,elapsed_s";

std::string format_trace_csv(const Trace<double>& trace);

/// Atomic write of the CSV (temp file + rename).
void write_trace_csv(const Trace<double>& trace, const std::filesystem::path& path);

Trace<double> read_trace_csv(const std::filesystem::path& path);

}  // namespace xrda::harness
