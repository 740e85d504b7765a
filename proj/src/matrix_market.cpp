#include "amgf/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "amgf/error.hpp"

namespace amgf {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++line_no;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", line_no);
  if (lower(object) != "matrix" || lower(format) != "coordinate")
    throw ParseError("only 'matrix coordinate' is supported", line_no);
  if (lower(field) != "real" && lower(field) != "integer")
    throw ParseError("only real fields are supported", line_no);
  const std::string sym = lower(symmetry);
  if (sym != "general" && sym != "symmetric")
    throw ParseError("symmetry must be general or symmetric", line_no);
  const bool is_symmetric = sym == "symmetric";

  // Skip comments to the size line.
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, nnz = -1;
  if (!(size_line >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
    throw ParseError("malformed size line", line_no);
  if (is_symmetric && rows != cols) throw ParseError("symmetric matrix must be square", line_no);

  TripletAssembler asm_(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  long long read = 0;
  while (read < nnz && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) throw ParseError("malformed entry", line_no);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("index out of declared range", line_no);
    asm_.add(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v);
    if (is_symmetric && i != j)
      asm_.add(static_cast<std::size_t>(j - 1), static_cast<std::size_t>(i - 1), v);
    ++read;
  }
  if (read != nnz) throw ParseError("fewer entries than declared", line_no);
  return asm_.finalize();
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a,
                         MatrixMarketSymmetry symmetry) {
  const bool sym = symmetry == MatrixMarketSymmetry::kSymmetric;
  if (sym && !a.is_symmetric(0.0)) throw DomainError("matrix market: matrix is not symmetric");
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j : a.row_columns(i))
      if (!sym || j <= i) ++count;
  out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << "\n";
  out << a.rows() << " " << a.cols() << " " << count << "\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto c = a.row_columns(i);
    auto v = a.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k)
      if (!sym || c[k] <= i) out << i + 1 << " " << c[k] + 1 << " " << v[k] << "\n";
  }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a,
                         MatrixMarketSymmetry symmetry) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_matrix_market(out, a, symmetry);
}

}  // namespace amgf
