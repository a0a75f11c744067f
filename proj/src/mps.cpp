#include "fipm/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace fipm {

namespace {

enum class Section { kNone, kName, kRows, kColumns, kRhs, kRanges, kBounds, kObjSense, kEnd };

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> splitFree(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Fixed fields start at columns 2, 5, 15, 25, 40, 50 (1-based).
std::vector<std::string> splitFixed(const std::string& line) {
  static const int kStart[] = {1, 4, 14, 24, 39, 49};
  static const int kWidth[] = {2, 8, 8, 12, 8, 12};
  std::vector<std::string> out;
  for (int f = 0; f < 6; ++f) {
    if (static_cast<int>(line.size()) <= kStart[f]) break;
    out.push_back(trim(line.substr(kStart[f], kWidth[f])));
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

class Parser {
 public:
  Parser(MpsFormat format) : format_(format) {}

  MpsResult run(std::istream& in);

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError("MPS line " + std::to_string(line_no_) + ": " + what);
  }
  double number(const std::string& s) const {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v))
      fail("bad number '" + s + "'");
    return v;
  }
  Index rowIndex(const std::string& name) const {
    auto it = rows_.find(name);
    if (it == rows_.end()) fail("unknown row '" + name + "'");
    return it->second;
  }
  Index colIndex(const std::string& name) const {
    auto it = cols_.find(name);
    if (it == cols_.end()) fail("unknown column '" + name + "'");
    return it->second;
  }

  // Fields of a data line with the leading code field dropped for
  // sections that have none (COLUMNS, RHS, RANGES).
  std::vector<std::string> fields(const std::string& line, bool coded) const;

  void rowsLine(const std::vector<std::string>& f);
  void columnsLine(const std::vector<std::string>& f);
  void rhsLine(const std::vector<std::string>& f);
  void rangesLine(const std::vector<std::string>& f);
  void boundsLine(const std::vector<std::string>& f);
  void addEntry(Index col, const std::string& row, double value);

  MpsFormat format_;
  Index line_no_ = 0;
  MpsResult result_;
  std::string objective_;
  std::unordered_map<std::string, Index> rows_;
  std::unordered_map<std::string, Index> cols_;
  std::vector<char> row_type_;
  std::vector<double> rhs_;
  std::vector<double> range_;
  std::vector<bool> has_range_;
  std::vector<Index> ti_, tj_;
  std::vector<double> tv_;
  std::map<std::pair<Index, Index>, bool> seen_;
  std::vector<bool> lower_set_;
};

std::vector<std::string> Parser::fields(const std::string& line,
                                        bool coded) const {
  std::vector<std::string> f;
  if (format_ == MpsFormat::kFree) return splitFree(line);
  f = splitFixed(line);
  if (!coded && !f.empty()) {
    if (!f[0].empty()) fail("unexpected code field");
    f.erase(f.begin());
  }
  return f;
}

void Parser::rowsLine(const std::vector<std::string>& f) {
  if (f.size() != 2) fail("ROWS entry needs a type and a name");
  const std::string type = f[0];
  const std::string& name = f[1];
  if (type == "N") {
    if (objective_.empty()) {
      objective_ = name;
    } else {
      result_.warnings.push_back("extra objective row '" + name + "' ignored");
      rows_[name] = -2;
    }
    return;
  }
  if (type != "L" && type != "G" && type != "E") fail("bad row type " + type);
  if (rows_.count(name) || name == objective_) fail("duplicate row " + name);
  rows_[name] = static_cast<Index>(row_type_.size());
  row_type_.push_back(type[0]);
  result_.lp.row_names.push_back(name);
}

void Parser::addEntry(Index col, const std::string& row, double value) {
  if (row == objective_) {
    result_.lp.cost[col] += value;
    return;
  }
  const Index i = rowIndex(row);
  if (i == -2) return;
  auto [it, inserted] = seen_.try_emplace({i, col}, true);
  if (!inserted)
    result_.warnings.push_back("duplicate entry (" + row + ", " +
                               result_.lp.col_names[col] + ") summed");
  ti_.push_back(i);
  tj_.push_back(col);
  tv_.push_back(value);
}

void Parser::columnsLine(const std::vector<std::string>& f) {
  for (const std::string& field : f)
    if (field == "'MARKER'")
      throw ModelError("integer variables are not supported");
  if (f.size() != 3 && f.size() != 5) fail("COLUMNS entry needs 3 or 5 fields");
  const std::string& name = f[0];
  auto it = cols_.find(name);
  Index col;
  if (it == cols_.end()) {
    col = static_cast<Index>(result_.lp.col_names.size());
    cols_[name] = col;
    result_.lp.col_names.push_back(name);
    result_.lp.cost.push_back(0.0);
  } else {
    col = it->second;
  }
  addEntry(col, f[1], number(f[2]));
  if (f.size() == 5) addEntry(col, f[3], number(f[4]));
}

void Parser::rhsLine(const std::vector<std::string>& f) {
  // Optional set name: odd field count means it is present.
  const std::size_t first = f.size() % 2 == 1 ? 1 : 0;
  if (f.size() - first != 2 && f.size() - first != 4)
    fail("RHS entry needs 1 or 2 (row, value) pairs");
  for (std::size_t k = first; k + 1 < f.size(); k += 2) {
    const double v = number(f[k + 1]);
    if (f[k] == objective_) {
      result_.lp.objective_offset = -v;
      continue;
    }
    const Index i = rowIndex(f[k]);
    if (i >= 0) rhs_[i] = v;
  }
}

void Parser::rangesLine(const std::vector<std::string>& f) {
  const std::size_t first = f.size() % 2 == 1 ? 1 : 0;
  if (f.size() - first != 2 && f.size() - first != 4)
    fail("RANGES entry needs 1 or 2 (row, value) pairs");
  for (std::size_t k = first; k + 1 < f.size(); k += 2) {
    const Index i = rowIndex(f[k]);
    if (i < 0) fail("range on an objective row");
    range_[i] = number(f[k + 1]);
    has_range_[i] = true;
  }
}

void Parser::boundsLine(const std::vector<std::string>& f) {
  if (f.empty()) fail("empty BOUNDS entry");
  const std::string& type = f[0];
  if (type == "BV" || type == "LI" || type == "UI" || type == "SC")
    throw ModelError("bound type " + type + " (integer/semicontinuous) is not supported");
  const bool valued = type == "UP" || type == "LO" || type == "FX";
  const bool valueless = type == "FR" || type == "MI" || type == "PL";
  if (!valued && !valueless) fail("unknown bound type " + type);

  // type [set] column [value]
  const std::size_t need = valued ? 3 : 2;
  if (f.size() != need && f.size() != need + 1) fail("bad BOUNDS entry");
  const std::size_t col_field = f.size() == need + 1 ? 2 : 1;
  const Index j = colIndex(f[col_field]);
  UserLp& lp = result_.lp;
  if (type == "FR") {
    lp.col_lower[j] = -kInf;
    lp.col_upper[j] = kInf;
  } else if (type == "MI") {
    lp.col_lower[j] = -kInf;
  } else if (type == "PL") {
    lp.col_upper[j] = kInf;
  } else {
    const double v = number(f[col_field + 1]);
    if (type == "UP") {
      lp.col_upper[j] = v;
      if (v < 0.0 && lp.col_lower[j] == 0.0 && !lower_set_[j]) {
        lp.col_lower[j] = -kInf;
        result_.warnings.push_back("negative upper bound on " + f[col_field] +
                                   " makes its lower bound -inf");
      }
    } else if (type == "LO") {
      lp.col_lower[j] = v;
      lower_set_[j] = true;
    } else {
      lp.col_lower[j] = v;
      lp.col_upper[j] = v;
      lower_set_[j] = true;
    }
  }
}

MpsResult Parser::run(std::istream& in) {
  Section section = Section::kNone;
  std::string raw;
  bool seen_end = false;
  UserLp& lp = result_.lp;

  auto startData = [&] {
    if (rhs_.size() != row_type_.size()) {
      rhs_.assign(row_type_.size(), 0.0);
      range_.assign(row_type_.size(), 0.0);
      has_range_.assign(row_type_.size(), false);
    }
  };
  auto startBounds = [&] {
    const std::size_t n = lp.col_names.size();
    if (lp.col_lower.size() != n) {
      lp.col_lower.assign(n, 0.0);
      lp.col_upper.assign(n, kInf);
      lower_set_.assign(n, false);
    }
  };

  while (std::getline(in, raw)) {
    ++line_no_;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string t = trim(raw);
    if (t.empty() || raw[0] == '*') continue;

    if (raw[0] != ' ' && raw[0] != '\t') {
      const std::vector<std::string> h = splitFree(raw);
      const std::string& key = h[0];
      if (key == "NAME") {
        section = Section::kName;
        if (format_ == MpsFormat::kFixed && raw.size() > 14)
          lp.name = trim(raw.substr(14));
        else if (h.size() > 1)
          lp.name = h[1];
      } else if (key == "ROWS") {
        section = Section::kRows;
      } else if (key == "COLUMNS") {
        section = Section::kColumns;
      } else if (key == "RHS") {
        section = Section::kRhs;
        startData();
      } else if (key == "RANGES") {
        section = Section::kRanges;
        startData();
      } else if (key == "BOUNDS") {
        section = Section::kBounds;
        startBounds();
      } else if (key == "OBJSENSE") {
        section = Section::kObjSense;
        if (h.size() > 1) {
          if (h[1] == "MAX" || h[1] == "MAXIMIZE")
            throw ModelError("maximisation is not supported");
          if (h[1] != "MIN" && h[1] != "MINIMIZE") fail("bad OBJSENSE");
        }
      } else if (key == "ENDATA") {
        seen_end = true;
        break;
      } else {
        fail("unknown section " + key);
      }
      continue;
    }

    switch (section) {
      case Section::kRows:
        rowsLine(format_ == MpsFormat::kFree ? splitFree(raw)
                                             : fields(raw, true));
        break;
      case Section::kColumns:
        columnsLine(fields(raw, false));
        break;
      case Section::kRhs:
        rhsLine(fields(raw, false));
        break;
      case Section::kRanges:
        rangesLine(fields(raw, false));
        break;
      case Section::kBounds:
        boundsLine(fields(raw, true));
        break;
      case Section::kObjSense: {
        const std::string s = t;
        if (s == "MAX" || s == "MAXIMIZE")
          throw ModelError("maximisation is not supported");
        if (s != "MIN" && s != "MINIMIZE") fail("bad OBJSENSE");
        break;
      }
      default:
        fail("data line outside a section");
    }
  }
  if (!seen_end) fail("missing ENDATA");
  if (objective_.empty()) fail("no objective row");
  startData();
  startBounds();

  const Index m = static_cast<Index>(row_type_.size());
  const Index n = static_cast<Index>(lp.col_names.size());
  lp.num_rows = m;
  lp.num_cols = n;
  lp.matrix = CscMatrix::fromTriplets(m, n, ti_, tj_, tv_);
  lp.row_lower.assign(m, -kInf);
  lp.row_upper.assign(m, kInf);
  for (Index i = 0; i < m; ++i) {
    const double r = rhs_[i];
    const double rng = std::abs(range_[i]);
    switch (row_type_[i]) {
      case 'L':
        lp.row_upper[i] = r;
        if (has_range_[i]) lp.row_lower[i] = r - rng;
        break;
      case 'G':
        lp.row_lower[i] = r;
        if (has_range_[i]) lp.row_upper[i] = r + rng;
        break;
      default:
        lp.row_lower[i] = r;
        lp.row_upper[i] = r;
        if (has_range_[i]) {
          if (range_[i] >= 0.0) lp.row_upper[i] = r + rng;
          else lp.row_lower[i] = r - rng;
        }
    }
  }
  return std::move(result_);
}

}  // namespace

MpsResult readMps(std::istream& in, MpsFormat format) {
  return Parser(format).run(in);
}

MpsResult readMps(const std::string& path, MpsFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return readMps(in, format);
}

}  // namespace fipm
