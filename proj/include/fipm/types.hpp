#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace fipm {

// 64-bit everywhere: nnz(L) and flop counts overflow 32 bits on large models.
using Index = std::int64_t;

inline constexpr Index kIndexMax = std::numeric_limits<Index>::max();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status {
  kOptimal,
  kImprecise,
  kIterationLimit,
  kTimeLimit,
  kNumericalFailure,
  kOutOfMemory,
};

const char* statusString(Status status);

// Malformed or unsupported model (bad bounds, integrality, empty equality row).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Counts that do not fit the index type, or allocation failure.
class OutOfMemoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Factorisation broke down even after perturbation.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, Index supernode)
      : std::runtime_error(what), supernode_(supernode) {}
  Index supernode() const { return supernode_; }

 private:
  Index supernode_;
};

}  // namespace fipm
