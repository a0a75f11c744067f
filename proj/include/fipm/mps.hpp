#pragma once

#include <istream>
#include <string>
#include <vector>

#include "fipm/lp_model.hpp"

namespace fipm {

enum class MpsFormat { kFree, kFixed };

struct MpsResult {
  UserLp lp;
  std::vector<std::string> warnings;
};

// Reads NAME/ROWS/COLUMNS/RHS/RANGES/BOUNDS/ENDATA. Duplicate matrix entries
// are summed with a warning. Integer markers, BV/LI/UI/SC bounds and
// OBJSENSE MAX throw ModelError; malformed input throws IoError.
MpsResult readMps(std::istream& in, MpsFormat format = MpsFormat::kFree);
MpsResult readMps(const std::string& path, MpsFormat format = MpsFormat::kFree);

}  // namespace fipm
