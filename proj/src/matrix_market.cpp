#include "fipm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace fipm {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

CscMatrix readMatrixMarket(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty Matrix Market stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lowercase(object) != "matrix" ||
      lowercase(format) != "coordinate")
    throw IoError("expected a coordinate Matrix Market header");
  if (lowercase(field) != "real" && lowercase(field) != "integer")
    throw IoError("unsupported Matrix Market field: " + field);
  if (lowercase(symmetry) != "symmetric")
    throw IoError("expected a symmetric Matrix Market matrix");

  do {
    if (!std::getline(in, line)) throw IoError("missing size line");
  } while (line.empty() || line[0] == '%');

  Index rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size(line);
    if (!(size >> rows >> cols >> entries) || rows != cols || rows < 0 ||
        entries < 0)
      throw IoError("bad Matrix Market size line");
  }

  std::vector<Index> ti, tj;
  std::vector<double> tv;
  ti.reserve(entries);
  tj.reserve(entries);
  tv.reserve(entries);
  for (Index k = 0; k < entries; ++k) {
    Index i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw IoError("truncated Matrix Market data");
    if (i < 1 || j < 1 || i > rows || j > cols)
      throw IoError("Matrix Market index out of range");
    --i;
    --j;
    if (i < j) std::swap(i, j);
    ti.push_back(i);
    tj.push_back(j);
    tv.push_back(v);
  }
  return CscMatrix::fromTriplets(rows, cols, ti, tj, tv);
}

CscMatrix readMatrixMarket(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return readMatrixMarket(in);
}

void writeMatrixMarket(std::ostream& out, const CscMatrix& lower) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << lower.rows << ' ' << lower.cols << ' ' << lower.nnz() << '\n';
  char buf[64];
  for (Index j = 0; j < lower.cols; ++j) {
    for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", lower.value[p]);
      out << lower.row_index[p] + 1 << ' ' << j + 1 << ' ' << buf << '\n';
    }
  }
}

void writeMatrixMarket(const std::string& path, const CscMatrix& lower) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  writeMatrixMarket(out, lower);
}

}  // namespace fipm
