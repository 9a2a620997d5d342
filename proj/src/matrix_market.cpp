#include "ellinc/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "ellinc/errors.hpp"

namespace ellinc {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw InputError("matrix market line " + std::to_string(line) + ": " + what,
                   "malformed_matrix_market");
}

}  // namespace

LinearMap read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) malformed(1, "empty input");
  ++lineno;

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") malformed(lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate") {
    malformed(lineno, "only 'matrix coordinate' is supported");
  }
  if (field != "real" && field != "integer") {
    malformed(lineno, "field '" + field + "' not supported (real or integer)");
  }
  if (symmetry != "general") {
    malformed(lineno, "symmetry '" + symmetry + "' not supported (general only)");
  }

  // Skip comments up to the size line.
  long long rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) malformed(lineno + 1, "missing size line");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0) {
      malformed(lineno, "bad size line '" + line + "'");
    }
    break;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  while (static_cast<long long>(triplets.size()) < nnz && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) malformed(lineno, "bad entry '" + line + "'");
    if (i < 1 || i > rows || j < 1 || j > cols) malformed(lineno, "index out of range");
    triplets.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
  }
  if (static_cast<long long>(triplets.size()) != nnz) {
    malformed(lineno, "expected " + std::to_string(nnz) + " entries, found " +
                          std::to_string(triplets.size()));
  }
  return LinearMap::from_triplets(rows, cols, triplets);
}

LinearMap read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'", "io_error");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const LinearMap& map) {
  const Matrix& m = map.dense();
  long long nnz = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << m(i, j) << '\n';
}

}  // namespace ellinc
