#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xrda/point.hpp"

namespace xrda::harness {

/// Shortest decimal that round-trips a double (17 significant digits).
std::string format_double(double v);

/// Dense matrix text format: one row per line, whitespace-separated decimals.
Matrix<double> read_matrix(const std::filesystem::path& path);
/// All numbers in the file, in order, regardless of line layout.
Vector<double> read_vector(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Matrix<double>& A);
/// One entry per line (an m x 1 matrix).
void write_vector(const std::filesystem::path& path, const Vector<double>& v);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace xrda::harness
