#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "twirl/errors.hpp"

namespace twirl {

/// Partition of k: positive parts in nonincreasing order.
using Partition = std::vector<int>;

inline int partition_sum(const Partition& p) { return std::accumulate(p.begin(), p.end(), 0); }

inline bool is_valid_partition(const Partition& p, int k) {
  int sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 1) return false;
    if (i > 0 && p[i] > p[i - 1]) return false;
    sum += p[i];
  }
  return sum == k;
}

/// All partitions of k in descending lexicographic order, (k) first, 1^k last.
inline std::vector<Partition> partitions_of(int k) {
  std::vector<Partition> out;
  Partition cur;
  auto rec = [&](auto&& self, int rem, int maxp) -> void {
    if (rem == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(rem, maxp); p >= 1; --p) {
      cur.push_back(p);
      self(self, rem - p, p);
      cur.pop_back();
    }
  };
  rec(rec, k, k);
  return out;
}

/// Partition of k from its nontrivial parts, padded with 1s:
/// padded_partition(5, {2,2}) -> 2+2+1.
inline Partition padded_partition(int k, std::initializer_list<int> nontrivial) {
  Partition p(nontrivial);
  int s = partition_sum(p);
  if (s > k) throw OutOfRange("partition parts exceed k");
  p.insert(p.end(), static_cast<std::size_t>(k - s), 1);
  return p;
}

inline Partition ones_partition(int k) { return Partition(static_cast<std::size_t>(k), 1); }

inline std::string partition_to_dash(const Partition& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += "-";
    s += std::to_string(p[i]);
  }
  return s;
}

inline Partition partition_from_dash(const std::string& s, int k) {
  Partition p;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] != '-') ++j;
    try {
      p.push_back(std::stoi(s.substr(i, j - i)));
    } catch (const std::exception&) {
      throw ParseError("bad partition part '" + s.substr(i, j - i) + "'", i);
    }
    i = j + 1;
  }
  if (!is_valid_partition(p, k))
    throw ParseError("'" + s + "' is not a partition of " + std::to_string(k), 0);
  return p;
}

/// Comma-separated CLI syntax, all parts explicit ("3,1,1").
inline Partition partition_from_csv(const std::string& s, int k) {
  std::string dashed = s;
  for (auto& c : dashed)
    if (c == ',') c = '-';
  return partition_from_dash(dashed, k);
}

}  // namespace twirl
