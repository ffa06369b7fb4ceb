#pragma once

#include <cstdint>
#include <vector>

#include "irew/term.hpp"

// Independent oracles used to pin expected values; these stay separate from
// the implementation paths they check.
namespace oracle {

// Bisimilarity by bounded unfolding: rational graphs agreeing on every level
// up to twice the node-count product agree everywhere.
inline bool naive_bisimilar(const irew::Term& s, const irew::Term& t) {
  int bound = 2 * s.size() * t.size();
  for (int n = 0; n <= bound; ++n)
    if (!irew::truncation_equal(s, t, n)) return false;
  return true;
}

// Least level where the terms differ, scanning truncation equality.
inline std::optional<int> naive_difference_level(const irew::Term& s,
                                                 const irew::Term& t) {
  if (naive_bisimilar(s, t)) return std::nullopt;
  int n = 0;
  while (irew::truncation_equal(s, t, n)) ++n;
  return n;
}

// All monotone merges of two index sequences (0 = left, 1 = right).
inline void enumerate_merges(int left, int right, std::vector<int>& cur,
                             std::vector<std::vector<int>>& out) {
  if (left == 0 && right == 0) {
    out.push_back(cur);
    return;
  }
  if (left > 0) {
    cur.push_back(0);
    enumerate_merges(left - 1, right, cur, out);
    cur.pop_back();
  }
  if (right > 0) {
    cur.push_back(1);
    enumerate_merges(left, right - 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> all_merges(int left, int right) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate_merges(left, right, cur, out);
  return out;
}

inline std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace oracle
