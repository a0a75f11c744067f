#include "fipm/dense_kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <utility>

namespace fipm {

const char* pivotRuleString(PivotRule rule) {
  switch (rule) {
    case PivotRule::kLift:
      return "lift";
    case PivotRule::kAccept:
      return "accept";
    case PivotRule::kAcceptRatio:
      return "accept-ratio";
    case PivotRule::kSwap:
      return "swap";
    case PivotRule::kTwoByTwo:
      return "2x2";
    case PivotRule::kFallback:
      return "fallback";
    case PivotRule::kSecondOfPair:
      return "2x2-second";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Level-3 style loops

namespace dense {

void gemmNT(Index rows, Index cols, Index k, const double* a, Index lda,
            const double* b, Index ldb, double* c, Index ldc) {
  for (Index i = 0; i < rows; ++i) {
    const double* ai = a + i * lda;
    double* ci = c + i * ldc;
    for (Index j = 0; j < cols; ++j) {
      const double* bj = b + j * ldb;
      double sum = 0.0;
      for (Index t = 0; t < k; ++t) sum += ai[t] * bj[t];
      ci[j] -= sum;
    }
  }
}

void syrkLowerNT(Index n, Index k, const double* a, Index lda,
                 const double* b, Index ldb, double* c, Index ldc) {
  for (Index i = 0; i < n; ++i) {
    const double* ai = a + i * lda;
    double* ci = c + i * ldc;
    for (Index j = 0; j <= i; ++j) {
      const double* bj = b + j * ldb;
      double sum = 0.0;
      for (Index t = 0; t < k; ++t) sum += ai[t] * bj[t];
      ci[j] -= sum;
    }
  }
}

void trsmRightUnitLowerT(Index rows, Index n, const double* l, Index ldl,
                         double* x, Index ldx) {
  for (Index i = 0; i < rows; ++i) {
    double* xi = x + i * ldx;
    for (Index c = 0; c < n; ++c) {
      const double* lc = l + c * ldl;
      double sum = xi[c];
      for (Index t = 0; t < c; ++t) sum -= lc[t] * xi[t];
      xi[c] = sum;
    }
  }
}

}  // namespace dense

// ---------------------------------------------------------------------------
// Pivot kernel

namespace {

struct Block {
  double* a;
  Index ld;
  double& operator()(Index i, Index j) { return a[i * ld + j]; }
  double operator()(Index i, Index j) const { return a[i * ld + j]; }
  double sym(Index i, Index j) const {
    return i >= j ? a[i * ld + j] : a[j * ld + i];
  }
};

void swapSymmetric(Block m, Index size, Index p, Index q) {
  if (p == q) return;
  if (p > q) std::swap(p, q);
  for (Index c = 0; c < p; ++c) std::swap(m(p, c), m(q, c));
  std::swap(m(p, p), m(q, q));
  for (Index c = p + 1; c < q; ++c) std::swap(m(c, p), m(q, c));
  for (Index i = q + 1; i < size; ++i) std::swap(m(i, p), m(i, q));
}

bool rightSign(int tag, double v) { return tag * v > 0.0; }

class Kernel {
 public:
  Kernel(double* block, Index ld, Index size, std::span<int> tags,
         const PivotParams& params)
      : m_{block, ld}, size_(size), tags_(tags), params_(params) {}

  PivotKernelResult run();

 private:
  void swap(Index p, Index q);
  double prop3Floor(Index p, Index skip) const;
  void oneByOne(Index p, PivotRule rule, bool lift);
  bool twoByTwoAcceptable(Index p, Index r) const;
  void twoByTwo(Index p);

  Block m_;
  Index size_;
  std::span<int> tags_;
  const PivotParams& params_;
  PivotKernelResult res_;
  double norm_ = 0.0;
  double lift_ = 0.0;
};

void Kernel::swap(Index p, Index q) {
  if (p == q) return;
  swapSymmetric(m_, size_, p, q);
  std::swap(tags_[p], tags_[q]);
  res_.swaps.emplace_back(p, q);
}

// Smallest pivot magnitude that keeps every remaining diagonal entry of the
// same tag on its side of zero.
double Kernel::prop3Floor(Index p, Index skip) const {
  const int t = tags_[p];
  double floor = 0.0;
  for (Index j = p + 1; j < size_; ++j) {
    if (j == skip || tags_[j] != t) continue;
    const double mjj = m_.sym(j, j);
    if (!rightSign(t, mjj)) continue;
    const double q = m_.sym(j, p);
    floor = std::max(floor, q * q / std::abs(mjj));
  }
  return floor;
}

void Kernel::oneByOne(Index p, PivotRule rule, bool lift) {
  const int t = tags_[p];
  const double v = m_(p, p);
  double mag = (lift || !rightSign(t, v)) ? lift_ : std::abs(v);
  const double floor = prop3Floor(p, -1);
  if (floor >= mag) mag = floor * (1.0 + 1e-6);
  const double pivot = t * mag;
  const double dynamic = pivot - v;
  if (std::abs(dynamic) > params_.catastrophe * norm_ || !std::isfinite(pivot))
    throw PivotBreakdown("pivot perturbation too large");

  const double stat = t * params_.staticFor(t);
  const double d = pivot + stat;
  res_.rule[p] = rule;
  res_.pivot_size[p] = 1;
  res_.d_diag[p] = d;
  res_.static_added[p] = stat;
  res_.dynamic_added[p] = dynamic;
  m_(p, p) = d;

  for (Index j = p + 1; j < size_; ++j) {
    const double lj = m_(j, p) / d;
    if (lj == 0.0) continue;
    for (Index i = j; i < size_; ++i) m_(i, j) -= m_(i, p) * lj;
  }
  for (Index j = p + 1; j < size_; ++j) m_(j, p) /= d;
}

bool Kernel::twoByTwoAcceptable(Index p, Index r) const {
  const double a = m_(p, p) + tags_[p] * params_.staticFor(tags_[p]);
  const double c = m_(r, r) + tags_[r] * params_.staticFor(tags_[r]);
  const double b = m_(r, p);
  const double det = a * c - b * b;
  if (!(det < 0.0) || !std::isfinite(det)) return false;
  for (Index j = p + 1; j < size_; ++j) {
    if (j == r) continue;
    const double mjj = m_.sym(j, j);
    if (!rightSign(tags_[j], mjj)) continue;
    const double u = m_.sym(j, p);
    const double w = m_.sym(j, r);
    const double q = (c * u * u - 2.0 * b * u * w + a * w * w) / det;
    if (!rightSign(tags_[j], mjj - q)) return false;
  }
  return true;
}

void Kernel::twoByTwo(Index p) {
  const Index p1 = p + 1;
  const double sa = tags_[p] * params_.staticFor(tags_[p]);
  const double sc = tags_[p1] * params_.staticFor(tags_[p1]);
  const double a = m_(p, p) + sa;
  const double c = m_(p1, p1) + sc;
  const double b = m_(p1, p);
  const double det = a * c - b * b;

  for (Index j = p + 2; j < size_; ++j) {
    const double u = m_(j, p);
    const double w = m_(j, p1);
    const double l1 = (c * u - b * w) / det;
    const double l2 = (a * w - b * u) / det;
    for (Index i = j; i < size_; ++i)
      m_(i, j) -= m_(i, p) * l1 + m_(i, p1) * l2;
  }
  for (Index j = p + 2; j < size_; ++j) {
    const double u = m_(j, p);
    const double w = m_(j, p1);
    m_(j, p) = (c * u - b * w) / det;
    m_(j, p1) = (a * w - b * u) / det;
  }
  m_(p, p) = a;
  m_(p1, p1) = c;

  res_.rule[p] = PivotRule::kTwoByTwo;
  res_.rule[p1] = PivotRule::kSecondOfPair;
  res_.pivot_size[p] = 2;
  res_.pivot_size[p1] = 0;
  res_.d_diag[p] = a;
  res_.d_diag[p1] = c;
  res_.d_off[p] = b;
  res_.static_added[p] = sa;
  res_.static_added[p1] = sc;
}

PivotKernelResult Kernel::run() {
  const Index s = size_;
  res_.rule.assign(s, PivotRule::kAccept);
  res_.pivot_size.assign(s, 1);
  res_.d_diag.assign(s, 0.0);
  res_.d_off.assign(s, 0.0);
  res_.static_added.assign(s, 0.0);
  res_.dynamic_added.assign(s, 0.0);

  for (Index j = 0; j < s; ++j) {
    double col = 0.0;
    for (Index i = 0; i < s; ++i) col += std::abs(m_.sym(i, j));
    norm_ = std::max(norm_, col);
  }
  res_.norm1 = norm_;
  if (norm_ == 0.0) norm_ = 1.0;
  lift_ = params_.delta * norm_;
  const double alpha = params_.alpha;

  Index p = 0;
  while (p < s) {
    // Largest correctly signed diagonal entry first.
    Index best = -1;
    double best_val = 0.0;
    for (Index i = p; i < s; ++i) {
      const double v = m_(i, i);
      if (rightSign(tags_[i], v) && std::abs(v) > best_val) {
        best = i;
        best_val = std::abs(v);
      }
    }
    if (best > p) swap(p, best);

    const double app = std::abs(m_(p, p));
    const bool p_ok = rightSign(tags_[p], m_(p, p));
    double gamma_p = 0.0;
    Index r = -1;
    for (Index i = p + 1; i < s; ++i) {
      if (std::abs(m_(i, p)) > gamma_p) {
        gamma_p = std::abs(m_(i, p));
        r = i;
      }
    }

    if (std::max(app, gamma_p) <= lift_) {
      oneByOne(p, PivotRule::kLift, true);
      ++p;
      continue;
    }
    if (p_ok && app >= alpha * gamma_p) {
      oneByOne(p, PivotRule::kAccept, false);
      ++p;
      continue;
    }
    if (r < 0) {
      // Wrong-signed entry with nothing else in its column.
      oneByOne(p, PivotRule::kFallback, true);
      ++p;
      continue;
    }
    double gamma_r = 0.0;
    for (Index j = p; j < s; ++j)
      if (j != r) gamma_r = std::max(gamma_r, std::abs(m_.sym(r, j)));

    if (p_ok && app * gamma_r >= alpha * gamma_p * gamma_p) {
      oneByOne(p, PivotRule::kAcceptRatio, false);
      ++p;
      continue;
    }
    const double arr = m_(r, r);
    if (rightSign(tags_[r], arr) && std::abs(arr) >= alpha * gamma_r) {
      swap(p, r);
      oneByOne(p, PivotRule::kSwap, false);
      ++p;
      continue;
    }
    if (tags_[p] != tags_[r] && twoByTwoAcceptable(p, r)) {
      swap(p + 1, r);
      twoByTwo(p);
      p += 2;
      continue;
    }
    oneByOne(p, PivotRule::kFallback, true);
    ++p;
  }
  return std::move(res_);
}

}  // namespace

PivotKernelResult pivotKernel(double* block, Index ld, Index size,
                              std::span<int> tags, const PivotParams& params) {
  assert(static_cast<Index>(tags.size()) == size);
  Kernel kernel(block, ld, size, tags, params);
  return kernel.run();
}

// ---------------------------------------------------------------------------
// Storage

Index hybridSize(Index n, Index nb) {
  Index total = 0;
  for (Index b0 = 0; b0 < n; b0 += nb) total += (n - b0) * std::min(nb, n - b0);
  return total;
}

void packedToHybrid(Index n, Index nb, const double* packed, double* hybrid) {
  std::fill(hybrid, hybrid + hybridSize(n, nb), 0.0);
  Index off = 0;
  for (Index b0 = 0; b0 < n; b0 += nb) {
    const Index w = std::min(nb, n - b0);
    for (Index j = b0; j < b0 + w; ++j)
      for (Index i = j; i < n; ++i)
        hybrid[off + (i - b0) * w + (j - b0)] = packed[packedIndex(n, i, j)];
    off += (n - b0) * w;
  }
}

void hybridToPacked(Index n, Index nb, const double* hybrid, double* packed) {
  Index off = 0;
  for (Index b0 = 0; b0 < n; b0 += nb) {
    const Index w = std::min(nb, n - b0);
    for (Index j = b0; j < b0 + w; ++j)
      for (Index i = j; i < n; ++i)
        packed[packedIndex(n, i, j)] = hybrid[off + (i - b0) * w + (j - b0)];
    off += (n - b0) * w;
  }
}

FrontalMatrix::FrontalMatrix(Index order, Index num_pivots, Index nb)
    : order_(order),
      num_pivots_(num_pivots),
      nb_(nb),
      data_(packedSize(order), 0.0),
      tags_(order, 1) {
  assert(nb >= 1 && num_pivots <= order);
  Index off = 0;
  for (Index b0 = 0; b0 < order; b0 += nb) {
    block_offset_.push_back(off);
    off += (order - b0) * std::min(nb, order - b0);
  }
}

Index FrontalMatrix::blockWidthOf(Index b) const {
  return std::min(nb_, order_ - b * nb_);
}

double& FrontalMatrix::at(Index i, Index j) {
  if (layout_ == FrontLayout::kPacked) return data_[packedIndex(order_, i, j)];
  const Index b = j / nb_;
  const Index b0 = b * nb_;
  return data_[block_offset_[b] + (i - b0) * blockWidthOf(b) + (j - b0)];
}

double FrontalMatrix::at(Index i, Index j) const {
  return const_cast<FrontalMatrix*>(this)->at(i, j);
}

void FrontalMatrix::toHybrid() {
  if (layout_ == FrontLayout::kHybrid) return;
  std::vector<double> h(hybridSize(order_, nb_));
  packedToHybrid(order_, nb_, data_.data(), h.data());
  data_.swap(h);
  layout_ = FrontLayout::kHybrid;
}

void FrontalMatrix::toPacked() {
  if (layout_ == FrontLayout::kPacked) return;
  std::vector<double> p(packedSize(order_));
  hybridToPacked(order_, nb_, data_.data(), p.data());
  data_.swap(p);
  layout_ = FrontLayout::kPacked;
}

void assembleExtendAdd(FrontalMatrix& parent, std::span<const double> child,
                       std::span<const Index> rel) {
  assert(parent.layout() == FrontLayout::kPacked);
  const Index nc = static_cast<Index>(rel.size());
  const Index np = parent.order();
  double* data = parent.data().data();
  Index k = 0;
  for (Index j = 0; j < nc; ++j) {
    const Index pj = rel[j];
    assert(pj >= 0 && pj < np);
    const Index col = packedIndex(np, pj, pj) - pj;
    for (Index i = j; i < nc; ++i) data[col + rel[i]] += child[k++];
  }
}

// ---------------------------------------------------------------------------
// Blocked partial factorisation

namespace {

// W = L D for rows x width entries of L (row-major, leading dimension ld)
// and the pivots starting at position c0.
void multiplyByD(const double* l, Index ld, Index rows, Index width,
                 const PartialFactorResult& r, Index c0, double* w) {
  for (Index i = 0; i < rows; ++i) {
    const double* li = l + i * ld;
    double* wi = w + i * width;
    for (Index c = 0; c < width; ++c) {
      const Index g = c0 + c;
      if (r.pivot_size[g] == 2) {
        wi[c] = li[c] * r.d_diag[g] + li[c + 1] * r.d_off[g];
        wi[c + 1] = li[c] * r.d_off[g] + li[c + 1] * r.d_diag[g + 1];
        ++c;
      } else {
        wi[c] = li[c] * r.d_diag[g];
      }
    }
  }
}

}  // namespace

PartialFactorResult partialFactor(FrontalMatrix& front,
                                  const PivotParams& params) {
  const Index n = front.order();
  const Index npiv = front.numPivots();
  const Index nb = front.blockWidth();

  PartialFactorResult res;
  res.local_perm.resize(npiv);
  std::iota(res.local_perm.begin(), res.local_perm.end(), Index{0});
  res.pivot_size.assign(npiv, 1);
  res.d_diag.assign(npiv, 0.0);
  res.d_off.assign(npiv, 0.0);
  res.static_added.assign(npiv, 0.0);
  res.dynamic_added.assign(npiv, 0.0);
  res.rule.assign(npiv, PivotRule::kAccept);
  if (npiv == 0) return res;

  front.toHybrid();
  double* data = front.data().data();
  std::span<int> tags(front.tags());
  std::vector<double> work;

  for (Index k0 = 0; k0 < npiv; k0 += nb) {
    const Index bk = k0 / nb;
    const Index k1 = std::min(k0 + nb, npiv);
    const Index s = k1 - k0;
    const Index wk = front.blockWidthOf(bk);
    double* dk = data + front.blockOffset(bk);

    // Updates from the already factorised blocks to the left.
    for (Index b = 0; b < bk; ++b) {
      const Index b0 = b * nb;
      const double* lb = data + front.blockOffset(b) + (k0 - b0) * nb;
      const Index rows = n - k0;
      work.resize(rows * nb);
      multiplyByD(lb, nb, rows, nb, res, b0, work.data());
      dense::syrkLowerNT(s, nb, work.data(), nb, lb, nb, dk, wk);
      dense::gemmNT(n - k1, s, nb, work.data() + s * nb, nb, lb, nb,
                    dk + s * wk, wk);
    }

    PivotKernelResult kr = pivotKernel(dk, wk, s, tags.subspan(k0, s), params);
    res.block_norm1.push_back(kr.norm1);

    for (auto [p, q] : kr.swaps) {
      const Index gp = k0 + p;
      const Index gq = k0 + q;
      for (Index b = 0; b < bk; ++b) {
        double* base = data + front.blockOffset(b) - b * nb * nb;
        std::swap_ranges(base + gp * nb, base + gp * nb + nb, base + gq * nb);
      }
      for (Index i = k1; i < n; ++i)
        std::swap(dk[(i - k0) * wk + p], dk[(i - k0) * wk + q]);
      std::swap(res.local_perm[gp], res.local_perm[gq]);
    }

    for (Index c = 0; c < s; ++c) {
      const Index g = k0 + c;
      res.pivot_size[g] = kr.pivot_size[c];
      res.d_diag[g] = kr.d_diag[c];
      res.d_off[g] = kr.d_off[c];
      res.static_added[g] = kr.static_added[c];
      res.dynamic_added[g] = kr.dynamic_added[c];
      res.rule[g] = kr.rule[c];
      dk[c * wk + c] = 1.0;
      if (kr.pivot_size[c] == 2) dk[(c + 1) * wk + c] = 0.0;
    }

    // B_P <- B_P L_D^{-T} D^{-1}
    double* bp = dk + s * wk;
    const Index prow = n - k1;
    dense::trsmRightUnitLowerT(prow, s, dk, wk, bp, wk);
    for (Index i = 0; i < prow; ++i) {
      double* xi = bp + i * wk;
      for (Index c = 0; c < s; ++c) {
        if (kr.pivot_size[c] == 2) {
          const double a = kr.d_diag[c], b = kr.d_off[c], d = kr.d_diag[c + 1];
          const double det = a * d - b * b;
          const double u = xi[c], v = xi[c + 1];
          xi[c] = (d * u - b * v) / det;
          xi[c + 1] = (a * v - b * u) / det;
          ++c;
        } else {
          xi[c] /= kr.d_diag[c];
        }
      }
    }
  }

  // Schur complement of the trailing rows.
  if (npiv < n) {
    const Index rows = n - npiv;
    for (Index b0 = 0; b0 < npiv; b0 += nb) {
      const Index b = b0 / nb;
      const Index wb = front.blockWidthOf(b);
      const Index pb = std::min(nb, npiv - b0);
      const double* lb = data + front.blockOffset(b) + (npiv - b0) * wb;
      work.resize(rows * pb);
      multiplyByD(lb, wb, rows, pb, res, b0, work.data());
      for (Index cb0 = (npiv / nb) * nb; cb0 < n; cb0 += nb) {
        const Index cb = cb0 / nb;
        const Index wcb = front.blockWidthOf(cb);
        const Index j0 = std::max(npiv, cb0);
        const Index j1 = cb0 + wcb;
        double* c = data + front.blockOffset(cb) + (j0 - cb0) * wcb + (j0 - cb0);
        const double* wj = work.data() + (j0 - npiv) * pb;
        const double* lj = lb + (j0 - npiv) * wb;
        dense::syrkLowerNT(j1 - j0, pb, wj, pb, lj, wb, c, wcb);
        dense::gemmNT(n - j1, j1 - j0, pb, wj + (j1 - j0) * pb, pb, lj, wb,
                      c + (j1 - j0) * wcb, wcb);
      }
    }
  }

  front.toPacked();
  return res;
}

}  // namespace fipm
