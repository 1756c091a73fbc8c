#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smith {

// Strictly increasing multi-indices over {0, ..., n-1}, enumerated in
// colexicographic order.  Dimension is hard-capped at 16 so all counts
// fit comfortably in 64 bits.

inline constexpr int kMaxDim = 16;

using MultiIndex = std::vector<int>;

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Rank of a strictly increasing multi-index in colex order:
// rank(i_1 < ... < i_k) = sum_a C(i_a, a).
inline std::int64_t colex_rank(const MultiIndex& idx) {
  std::int64_t r = 0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    r += binomial(idx[a], static_cast<int>(a) + 1);
  return r;
}

inline MultiIndex colex_unrank(std::int64_t rank, int n, int k) {
  MultiIndex idx(k);
  for (int a = k; a >= 1; --a) {
    int v = a - 1;
    while (v + 1 < n && binomial(v + 1, a) <= rank) ++v;
    idx[a - 1] = v;
    rank -= binomial(v, a);
  }
  return idx;
}

// Iterate all C(n,k) increasing multi-indices in colex order.
template <typename F>
void for_each_subset(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  MultiIndex idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  const std::int64_t total = binomial(n, k);
  for (std::int64_t r = 0; r < total; ++r) {
    f(r, static_cast<const MultiIndex&>(idx));
    // next in colex: bump the lowest index that can move
    int a = 0;
    while (a < k && idx[a] + 1 == (a + 1 < k ? idx[a + 1] : n)) ++a;
    if (a == k) break;
    ++idx[a];
    for (int b = 0; b < a; ++b) idx[b] = b;
  }
}

// Merge two disjoint increasing index sets, returning the permutation sign
// of the shuffle, or 0 if they intersect.
inline int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex* out) {
  out->clear();
  out->reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  int swaps = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      out->push_back(a[i++]);
    } else {
      // b[j] jumps over the remaining a-entries
      swaps += static_cast<int>(a.size() - i);
      out->push_back(b[j++]);
    }
  }
  while (i < a.size()) out->push_back(a[i++]);
  while (j < b.size()) out->push_back(b[j++]);
  return (swaps % 2 == 0) ? 1 : -1;
}

// Complement of idx in {0,...,n-1}, increasing.
inline MultiIndex complement(const MultiIndex& idx, int n) {
  MultiIndex out;
  out.reserve(n - idx.size());
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    if (j < idx.size() && idx[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// Sign of the permutation (idx, complement(idx)) relative to (0,...,n-1).
inline int complement_sign(const MultiIndex& idx, int n) {
  MultiIndex comp = complement(idx, n);
  MultiIndex merged;
  return merge_sign(idx, comp, &merged);
}

// Insert a single index into an increasing set; sign of moving it to front.
// Returns 0 if already present.  position_sign(i, J) = (-1)^{#{j in J : j < i}}.
inline int position_sign(int i, const MultiIndex& J) {
  int before = 0;
  for (int j : J) {
    if (j == i) return 0;
    if (j < i) ++before;
  }
  return (before % 2 == 0) ? 1 : -1;
}

}  // namespace smith
