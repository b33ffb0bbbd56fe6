#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cassert>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/partition.hpp"

namespace twirl {

/// One of the 2k symbols of the index set: 1,1~,2,2~,...,k,k~ (the bar is
/// spelled ~ throughout the ASCII surface).
struct Symbol {
  int value = 1;  // 1..k
  bool barred = false;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Slot encoding interleaves unbarred/barred: b -> 2(b-1), b~ -> 2(b-1)+1.
inline int slot_of(Symbol s) { return 2 * (s.value - 1) + (s.barred ? 1 : 0); }
inline Symbol symbol_at(int slot) { return Symbol{slot / 2 + 1, (slot & 1) != 0}; }

inline std::string symbol_to_string(Symbol s) {
  return (s.barred ? "~" : "") + std::to_string(s.value);
}

/// Permutation of the 2k-symbol index set, stored as an image array over
/// slots.  Immutable value type.
class Permutation {
 public:
  explicit Permutation(int k) : k_(k), img_(static_cast<std::size_t>(2 * k)) {
    if (k < 1) throw OutOfRange("k must be >= 1");
    std::iota(img_.begin(), img_.end(), 0);
  }

  static Permutation from_images(int k, std::vector<std::uint8_t> img) {
    Permutation p(k);
    if (img.size() != static_cast<std::size_t>(2 * k))
      throw DimensionMismatch("image array size mismatch");
    std::vector<bool> seen(img.size(), false);
    for (auto v : img) {
      if (v >= img.size() || seen[v]) throw Error("image array is not a bijection");
      seen[v] = true;
    }
    p.img_ = std::move(img);
    return p;
  }

  int k() const { return k_; }
  int size() const { return 2 * k_; }
  const std::vector<std::uint8_t>& images() const { return img_; }

  int operator()(int slot) const { return img_[static_cast<std::size_t>(slot)]; }
  Symbol operator()(Symbol s) const { return symbol_at(img_[static_cast<std::size_t>(slot_of(s))]); }

  bool is_identity() const {
    for (std::size_t i = 0; i < img_.size(); ++i)
      if (img_[i] != i) return false;
    return true;
  }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.k_ == b.k_ && a.img_ == b.img_;
  }
  friend bool operator!=(const Permutation& a, const Permutation& b) { return !(a == b); }
  friend bool operator<(const Permutation& a, const Permutation& b) {
    return a.k_ != b.k_ ? a.k_ < b.k_ : a.img_ < b.img_;
  }

 private:
  template <class F>
  friend void enumerate_s2k(int k, F&& fn);

  int k_;
  std::vector<std::uint8_t> img_;
};

/// (a o b)(z) = a(b(z)).
inline Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.k() != b.k()) throw DimensionMismatch("compose: mismatched k");
  std::vector<std::uint8_t> img(static_cast<std::size_t>(a.size()));
  for (int z = 0; z < a.size(); ++z)
    img[static_cast<std::size_t>(z)] = static_cast<std::uint8_t>(a(b(z)));
  return Permutation::from_images(a.k(), std::move(img));
}

inline Permutation operator*(const Permutation& a, const Permutation& b) { return compose(a, b); }

inline Permutation inverse(const Permutation& a) {
  std::vector<std::uint8_t> img(static_cast<std::size_t>(a.size()));
  for (int z = 0; z < a.size(); ++z) img[static_cast<std::size_t>(a(z))] = static_cast<std::uint8_t>(z);
  return Permutation::from_images(a.k(), std::move(img));
}

/// omega g omega^-1 g^-1
inline Permutation commutator(const Permutation& omega, const Permutation& g) {
  return omega * g * inverse(omega) * inverse(g);
}

/// Successor b+1 on [k] with wraparound; the one place the "modulo k"
/// convention lives.
inline int cyclic_next(int b, int k) { return b < k ? b + 1 : 1; }
inline int cyclic_prev(int b, int k) { return b > 1 ? b - 1 : k; }

/// T = (1 1~)(2 2~)...(k k~)
inline Permutation fixed_T(int k) {
  std::vector<std::uint8_t> img(static_cast<std::size_t>(2 * k));
  for (int i = 0; i < k; ++i) {
    img[static_cast<std::size_t>(2 * i)] = static_cast<std::uint8_t>(2 * i + 1);
    img[static_cast<std::size_t>(2 * i + 1)] = static_cast<std::uint8_t>(2 * i);
  }
  return Permutation::from_images(k, std::move(img));
}

/// Q = (1 k~)(2 1~)(3 2~)...(k k-1~)
inline Permutation fixed_Q(int k) {
  std::vector<std::uint8_t> img(static_cast<std::size_t>(2 * k));
  for (int b = 1; b <= k; ++b) {
    img[static_cast<std::size_t>(slot_of({b, false}))] =
        static_cast<std::uint8_t>(slot_of({cyclic_prev(b, k), true}));
    img[static_cast<std::size_t>(slot_of({b, true}))] =
        static_cast<std::uint8_t>(slot_of({cyclic_next(b, k), false}));
  }
  return Permutation::from_images(k, std::move(img));
}

/// s = (1 2 ... k)(1~ 2~ ... k~)
inline Permutation fixed_s(int k) {
  std::vector<std::uint8_t> img(static_cast<std::size_t>(2 * k));
  for (int b = 1; b <= k; ++b) {
    img[static_cast<std::size_t>(slot_of({b, false}))] =
        static_cast<std::uint8_t>(slot_of({cyclic_next(b, k), false}));
    img[static_cast<std::size_t>(slot_of({b, true}))] =
        static_cast<std::uint8_t>(slot_of({cyclic_next(b, k), true}));
  }
  return Permutation::from_images(k, std::move(img));
}

struct FixedPerms {
  Permutation T, Q, s;
};

inline FixedPerms fixed_perms(int k) { return {fixed_T(k), fixed_Q(k), fixed_s(k)}; }

/// Cycle type as length -> multiplicity (fixed points included as 1-cycles).
struct CycleType {
  std::map<int, int> multiplicities;

  int total() const {
    int t = 0;
    for (auto [len, cnt] : multiplicities) t += len * cnt;
    return t;
  }
  int cycle_count() const {
    int t = 0;
    for (auto [len, cnt] : multiplicities) t += cnt;
    return t;
  }
  friend bool operator==(const CycleType&, const CycleType&) = default;
};

inline CycleType cycle_type(const Permutation& p) {
  CycleType t;
  std::vector<bool> seen(static_cast<std::size_t>(p.size()), false);
  for (int i = 0; i < p.size(); ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    int len = 0, j = i;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      j = p(j);
      ++len;
    }
    ++t.multiplicities[len];
  }
  return t;
}

/// Partition of k obtained by halving every multiplicity of the cycle type.
/// Defined for permutations (like [omega,T] and [omega,Q]) whose cycle
/// lengths all occur an even number of times.
inline Partition half_type(const Permutation& p) {
  CycleType t = cycle_type(p);
  Partition parts;
  for (auto it = t.multiplicities.rbegin(); it != t.multiplicities.rend(); ++it) {
    auto [len, cnt] = *it;
    if (cnt % 2 != 0)
      throw OddMultiplicity("cycle length " + std::to_string(len) +
                            " occurs an odd number of times");
    parts.insert(parts.end(), static_cast<std::size_t>(cnt / 2), len);
  }
  return parts;
}

// ---- cycle-notation grammar: "(1 ~1)(2 3)"; bar spelled ~, fixed points
//      omitted, identity rendered "()".

inline Permutation parse_cycles(const std::string& text, int k) {
  std::vector<std::uint8_t> img(static_cast<std::size_t>(2 * k));
  std::iota(img.begin(), img.end(), 0);
  std::vector<bool> used(img.size(), false);
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  bool any = false;
  while (i < text.size()) {
    if (text[i] != '(') throw ParseError("expected '('", i);
    ++i;
    std::vector<int> cycle;
    skip_ws();
    while (i < text.size() && text[i] != ')') {
      bool barred = false;
      if (text[i] == '~') {
        barred = true;
        ++i;
      }
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i == start) throw ParseError("expected symbol", i);
      int v = std::stoi(text.substr(start, i - start));
      if (v < 1 || v > k)
        throw OutOfRange("symbol " + std::to_string(v) + " outside [1.." + std::to_string(k) + "]");
      int slot = slot_of({v, barred});
      if (used[static_cast<std::size_t>(slot)])
        throw ParseError("symbol repeated: " + symbol_to_string({v, barred}), start);
      used[static_cast<std::size_t>(slot)] = true;
      cycle.push_back(slot);
      skip_ws();
    }
    if (i >= text.size()) throw ParseError("unterminated cycle", i);
    ++i;  // ')'
    if (cycle.size() == 1) throw ParseError("singleton cycle (omit fixed points)", i - 1);
    for (std::size_t j = 0; j < cycle.size(); ++j)
      img[static_cast<std::size_t>(cycle[j])] =
          static_cast<std::uint8_t>(cycle[(j + 1) % cycle.size()]);
    any = true;
    skip_ws();
  }
  (void)any;
  return Permutation::from_images(k, std::move(img));
}

inline std::string render_cycles(const Permutation& p) {
  std::string out;
  std::vector<bool> seen(static_cast<std::size_t>(p.size()), false);
  for (int i = 0; i < p.size(); ++i) {
    if (seen[static_cast<std::size_t>(i)] || p(i) == i) continue;
    out += "(";
    int j = i;
    bool first = true;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      if (!first) out += " ";
      out += symbol_to_string(symbol_at(j));
      first = false;
      j = p(j);
    }
    out += ")";
  }
  return out.empty() ? "()" : out;
}

// ---- JSON image-array serialization ----

inline nlohmann::json to_json(const Permutation& p) {
  return nlohmann::json{{"k", p.k()}, {"images", p.images()}};
}

inline Permutation permutation_from_json(const nlohmann::json& j) {
  return Permutation::from_images(j.at("k").get<int>(),
                                  j.at("images").get<std::vector<std::uint8_t>>());
}

// ---- exhaustive enumeration of S_2k (lexicographic on image arrays) with
//      contiguous-chunk splitting for parallel reduction.

inline std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

/// Image array of the `rank`-th (0-based) permutation of [0..n) in
/// lexicographic order, via the factorial number system.
inline std::vector<std::uint8_t> unrank_images(int n, std::uint64_t rank) {
  std::vector<std::uint8_t> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::uint8_t> img;
  img.reserve(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    std::uint64_t f = factorial(i);
    std::size_t idx = static_cast<std::size_t>(rank / f);
    rank %= f;
    img.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return img;
}

/// Invoke fn(images) for ranks [begin, end) of the lexicographic stream over
/// arrays of size n.  The buffer passed to fn is reused between calls.
template <class F>
void enumerate_images_range(int n, std::uint64_t begin, std::uint64_t end, F&& fn) {
  if (begin >= end) return;
  std::vector<std::uint8_t> img = unrank_images(n, begin);
  for (std::uint64_t r = begin; r < end; ++r) {
    fn(const_cast<const std::vector<std::uint8_t>&>(img));
    if (r + 1 < end) std::next_permutation(img.begin(), img.end());
  }
}

/// Full stream over S_2k in lexicographic order.  fn receives a Permutation
/// reference that is only valid during the call.
template <class F>
void enumerate_s2k(int k, F&& fn) {
  Permutation p(k);
  std::vector<std::uint8_t> img = p.images();
  std::uint64_t total = factorial(2 * k);
  for (std::uint64_t r = 0; r < total; ++r) {
    p.img_ = img;
    fn(const_cast<const Permutation&>(p));
    if (r + 1 < total) std::next_permutation(img.begin(), img.end());
  }
}

/// Transversal of the right cosets omega<s>: the representative is the coset
/// element whose image of symbol 1 is minimal among the images of unbarred
/// symbols.  Enumerated in lexicographic order on image arrays; exactly
/// (2k)!/k items.
template <class F>
void enumerate_coset_reps(int k, F&& fn) {
  const int n = 2 * k;
  std::vector<std::uint8_t> img(static_cast<std::size_t>(n));
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  auto rec = [&](auto&& self, int slot) -> void {
    if (slot == n) {
      fn(const_cast<const std::vector<std::uint8_t>&>(img));
      return;
    }
    bool unbarred = (slot % 2 == 0);
    for (int v = 0; v < n; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      // slot 0 sets the minimum; later unbarred slots must exceed it
      if (unbarred && slot > 0 && v < img[0]) continue;
      used[static_cast<std::size_t>(v)] = true;
      img[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(v);
      self(self, slot + 1);
      used[static_cast<std::size_t>(v)] = false;
    }
  };
  rec(rec, 0);
}

}  // namespace twirl
