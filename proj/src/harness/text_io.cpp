#include "xrda/harness/text_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include "xrda/errors.hpp"

namespace xrda::harness {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<double> parse_numbers(const std::string& line, const fs::path& path, std::size_t lineno) {
  std::vector<double> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix<double> read_matrix(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto vals = parse_numbers(line, path, lineno);
    if (vals.empty()) continue;
    if (!rows.empty() && vals.size() != rows.front().size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(rows.front().size()) + " columns, found " + std::to_string(vals.size()));
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw IoError(path.string() + ": no data");
  Matrix<double> A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return A;
}

Vector<double> read_vector(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<double> all;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto vals = parse_numbers(line, path, lineno);
    all.insert(all.end(), vals.begin(), vals.end());
  }
  if (all.empty()) throw IoError(path.string() + ": no data");
  return Eigen::Map<const Vector<double>>(all.data(), static_cast<Eigen::Index>(all.size()));
}

void write_matrix(const fs::path& path, const Matrix<double>& A) {
  std::string out;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_double(A(i, j));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_vector(const fs::path& path, const Vector<double>& v) {
  write_matrix(path, Matrix<double>(v));
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

}  // namespace xrda::harness
