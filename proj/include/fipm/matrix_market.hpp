#pragma once

#include <iosfwd>
#include <string>

#include "fipm/sparse_matrix.hpp"

namespace fipm {

// Coordinate real symmetric Matrix Market files. Entries above the diagonal
// are mirrored into the lower triangle; duplicates are summed.
CscMatrix readMatrixMarket(std::istream& in);
CscMatrix readMatrixMarket(const std::string& path);

// Writes the lower triangle with 1-based indices.
void writeMatrixMarket(std::ostream& out, const CscMatrix& lower);
void writeMatrixMarket(const std::string& path, const CscMatrix& lower);

}  // namespace fipm
