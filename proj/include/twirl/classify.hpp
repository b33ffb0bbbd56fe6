#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/graph_model.hpp"
#include "twirl/moments.hpp"
#include "twirl/partition.hpp"
#include "twirl/permutation.hpp"

namespace twirl {

/// Census key: bar-class preservation plus the two commutator half-types.
struct ClassKey {
  bool regular = true;
  Partition alpha;  // half-type of [omega,T]
  Partition beta;   // half-type of [omega,Q]

  friend bool operator==(const ClassKey&, const ClassKey&) = default;
  friend bool operator<(const ClassKey& a, const ClassKey& b) {
    if (a.regular != b.regular) return a.regular > b.regular;  // regular first
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.beta < b.beta;
  }

  std::string to_string() const {
    return std::string(regular ? "Reg" : "Irreg") + "(" + partition_to_dash(alpha) + ", " +
           partition_to_dash(beta) + ")";
  }
};

struct ClassEntry {
  BigInt count;
  std::vector<Permutation> samples;  // first by enumeration order, bounded
};

struct ClassCensus {
  int k = 0;
  int sample_cap = 8;
  std::map<ClassKey, ClassEntry> table;
  std::uint64_t chi_zero = 0;
  std::uint64_t total = 0;
  double wall_seconds = 0;

  BigInt count_of(const ClassKey& key) const {
    auto it = table.find(key);
    return it == table.end() ? BigInt(0) : it->second.count;
  }
};

struct CensusOptions {
  int max_k = 5;  // raisable, but the exhaustive census is capped at k = 6
  int threads = 0;
};

/// Classification of one permutation; nullopt when chi = 0 (the permutation
/// does not contribute).
inline std::optional<ClassKey> membership(const Permutation& w) {
  const int k = w.k();
  Permutation inv_w = inverse(w);
  int parts_buf[32], m = 0;
  int chi_v = detail::directed_cycle_scan(w.images().data(), inv_w.images().data(), k, parts_buf, &m);
  if (!chi_v) return std::nullopt;
  Partition beta(parts_buf, parts_buf + m);
  std::sort(beta.rbegin(), beta.rend());
  bool regular = true;
  for (int b = 0; b < k && regular; ++b) regular = (w(2 * b) % 2) == 0;
  return ClassKey{regular, half_type(commutator(w, fixed_T(k))), beta};
}

namespace detail {

struct RawEntry {
  std::uint64_t count = 0;
  std::vector<std::vector<std::uint8_t>> samples;
};

inline std::uint64_t class_key_packed(bool regular, std::uint64_t akey, std::uint64_t bkey) {
  return (regular ? 1u : 0u) | (akey << 1) | (bkey << 31);
}

}  // namespace detail

/// Exhaustive census of S_2k: every chi = 1 permutation counted under its
/// (regularity, alpha, beta) key with up to sample_cap stored witnesses.
inline ClassCensus census(int k, int sample_cap = 8, const CensusOptions& opts = {}) {
  if (k < 1) throw OutOfRange("k must be >= 1");
  if (k > opts.max_k || k > 6)
    throw BudgetExceeded("census k=" + std::to_string(k) + " exceeds max_k=" + std::to_string(opts.max_k));
  auto t0 = std::chrono::steady_clock::now();

  const std::uint64_t n_items = factorial(2 * k);
  const int nthreads = detail::resolve_threads(opts.threads);
  const std::uint64_t n_chunks = std::min<std::uint64_t>(64, n_items);

  using RawMap = std::unordered_map<std::uint64_t, detail::RawEntry>;
  std::vector<RawMap> partial(n_chunks);
  std::vector<std::uint64_t> partial_chi0(n_chunks, 0);

  auto worker = [&](int wi) {
    std::uint8_t inv[32];
    int parts_buf[32], lens[32];
    for (std::uint64_t c = static_cast<std::uint64_t>(wi); c < n_chunks; c += static_cast<std::uint64_t>(nthreads)) {
      std::uint64_t begin = n_items * c / n_chunks;
      std::uint64_t end = n_items * (c + 1) / n_chunks;
      enumerate_images_range(2 * k, begin, end, [&](const std::vector<std::uint8_t>& img) {
        const int n = 2 * k;
        for (int z = 0; z < n; ++z) inv[img[static_cast<std::size_t>(z)]] = static_cast<std::uint8_t>(z);
        int m = 0;
        int chi_v = detail::directed_cycle_scan(img.data(), inv, k, parts_buf, &m);
        if (!chi_v) {
          ++partial_chi0[c];
          return;
        }
        std::uint64_t bkey = 0;
        for (int i = 0; i < m; ++i) bkey += std::uint64_t(1) << (4 * (parts_buf[i] - 1));
        int nc = detail::comm_t_cycle_lengths(img.data(), inv, k, lens);
        std::uint8_t mult[33] = {0};
        for (int i = 0; i < nc; ++i) ++mult[lens[i]];
        std::uint64_t akey = 0;
        for (int l = 1; l <= n; ++l)
          if (mult[l]) akey += std::uint64_t(mult[l] / 2) << (4 * (l - 1));
        bool regular = true;
        for (int b = 0; b < k && regular; ++b) regular = (img[static_cast<std::size_t>(2 * b)] % 2) == 0;
        auto& e = partial[c][detail::class_key_packed(regular, akey, bkey)];
        ++e.count;
        if (e.samples.size() < static_cast<std::size_t>(sample_cap)) e.samples.push_back(img);
      });
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  // decode packed keys via the partition dictionary
  std::unordered_map<std::uint64_t, Partition> decode;
  for (const auto& p : partitions_of(k)) decode[detail::partition_key(p)] = p;

  ClassCensus out;
  out.k = k;
  out.sample_cap = sample_cap;
  out.total = n_items;
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    out.chi_zero += partial_chi0[c];
    for (auto& [packed, raw] : partial[c]) {
      ClassKey key{(packed & 1) != 0, decode.at((packed >> 1) & 0x3FFFFFFF), decode.at(packed >> 31)};
      auto& entry = out.table[key];
      entry.count += raw.count;
      for (auto& img : raw.samples)
        if (entry.samples.size() < static_cast<std::size_t>(sample_cap))
          entry.samples.push_back(Permutation::from_images(k, img));
    }
  }
  // merged per chunk in packed-key hash order: restore first-by-enumeration
  // witness rule by re-sorting the bounded sample lists
  for (auto& [key, entry] : out.table) std::sort(entry.samples.begin(), entry.samples.end());
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// ---- Lemma verification ----

struct LemmaClause {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct LemmaReport {
  std::vector<LemmaClause> clauses;
  bool all_pass() const {
    for (const auto& c : clauses)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

/// All s^n w s^m over n,m in [k].
inline std::set<Permutation> shift_family(const Permutation& w) {
  const int k = w.k();
  Permutation s = fixed_s(k);
  std::set<Permutation> fam;
  Permutation sn(k);
  for (int n = 0; n < k; ++n) {
    Permutation sm(k);
    for (int m = 0; m < k; ++m) {
      fam.insert(sn * w * sm);
      sm = sm * s;
    }
    sn = sn * s;
  }
  return fam;
}

inline LemmaClause check_family(const std::string& name, const ClassCensus& cen,
                                const std::vector<Permutation>& generators,
                                const ClassKey& expected, const BigInt& expected_count,
                                int expected_multiplicity = 1) {
  std::map<Permutation, int> multi;
  const int k = cen.k;
  Permutation s = fixed_s(k);
  for (const auto& g : generators) {
    Permutation sn(k);
    for (int n = 0; n < k; ++n) {
      Permutation sm(k);
      for (int m = 0; m < k; ++m) {
        ++multi[sn * g * sm];
        sm = sm * s;
      }
      sn = sn * s;
    }
  }
  for (const auto& [w, mult] : multi) {
    if (mult != expected_multiplicity)
      return {name, false,
              "parametrization multiplicity " + std::to_string(mult) + " != " +
                  std::to_string(expected_multiplicity) + " at " + render_cycles(w)};
    auto got = membership(w);
    if (!got || !(*got == expected))
      return {name, false,
              "family member " + render_cycles(w) + " classifies as " +
                  (got ? got->to_string() : "NotContributing") + ", expected " + expected.to_string()};
  }
  BigInt family_size(static_cast<std::uint64_t>(multi.size()));
  if (family_size != expected_count)
    return {name, false, "family size " + family_size.str() + " != expected " + expected_count.str()};
  BigInt counted = cen.count_of(expected);
  if (counted != expected_count)
    return {name, false,
            "census count " + counted.str() + " != " + expected_count.str() + " for " + expected.to_string()};
  return {name, true,
          expected.to_string() + " = " + expected_count.str() + " shift-family members"};
}

}  // namespace detail

/// All clauses of the regular/irregular classification lemmas, checked as set
/// equalities against the parametrized shift families (ranges that are empty
/// at small k are checked as such).
inline LemmaReport verify_lemmas(const ClassCensus& cen) {
  const int k = cen.k;
  if (k < 2) throw OutOfRange("lemma verification needs k >= 2");
  LemmaReport rep;
  Partition id_p = ones_partition(k);
  Permutation id(k);
  Permutation s = fixed_s(k);

  // Reg(id,id) = {s^n}, cardinality k
  {
    std::set<Permutation> fam;
    Permutation sn(k);
    for (int n = 0; n < k; ++n) {
      fam.insert(sn);
      sn = sn * s;
    }
    LemmaClause c{"reg-id-id-shifts", true, ""};
    if (fam.size() != static_cast<std::size_t>(k)) {
      c = {c.name, false, "shift family has size " + std::to_string(fam.size())};
    } else {
      for (const auto& w : fam) {
        auto got = membership(w);
        if (!got || !(*got == ClassKey{true, id_p, id_p})) {
          c = {c.name, false, "s^n member " + render_cycles(w) + " misclassified"};
          break;
        }
      }
      if (c.pass && cen.count_of({true, id_p, id_p}) != BigInt(k))
        c = {c.name, false, "census count != k"};
      if (c.pass) c.detail = "Reg(id,id) = {s^n}, |.| = " + std::to_string(k);
    }
    rep.clauses.push_back(c);
  }

  // Reg(id, 2^1) empty
  rep.clauses.push_back([&] {
    BigInt n = cen.count_of({true, id_p, padded_partition(k, {2})});
    return LemmaClause{"reg-id-2-empty", n == 0, "count = " + n.str()};
  }());

  // Irreg(alpha, id) empty for every alpha
  rep.clauses.push_back([&] {
    for (const auto& [key, entry] : cen.table)
      if (!key.regular && key.beta == id_p)
        return LemmaClause{"irreg-any-id-empty", false,
                           key.to_string() + " has count " + entry.count.str()};
    return LemmaClause{"irreg-any-id-empty", true, "no irregular class with beta = id"};
  }());

  // Irreg(id, 2^1) = {s^n (1 1~) s^m}, k^2
  rep.clauses.push_back(detail::check_family(
      "irreg-id-2-family", cen, {parse_cycles("(1 ~1)", k)},
      {false, id_p, padded_partition(k, {2})}, BigInt(k) * k));

  // Irreg(2^1, 2^1) = {s^n (b 1~) s^m : 3 <= b <= k}, k^2 (k-2)
  {
    std::vector<Permutation> gens;
    for (int b = 3; b <= k; ++b) gens.push_back(parse_cycles("(" + std::to_string(b) + " ~1)", k));
    if (gens.empty()) {
      BigInt n = k >= 2 ? cen.count_of({false, padded_partition(k, {2}), padded_partition(k, {2})})
                        : BigInt(0);
      rep.clauses.push_back({"irreg-2-2-family", n == 0, "vacuous range, count = " + n.str()});
    } else {
      rep.clauses.push_back(detail::check_family(
          "irreg-2-2-family", cen, gens,
          {false, padded_partition(k, {2}), padded_partition(k, {2})},
          BigInt(k) * k * (k - 2)));
    }
  }

  // Irreg(id, 2^2): two parametrizations, each permutation counted twice
  {
    std::vector<Permutation> gens;
    for (int b = 3; b <= k - 1; ++b) {
      gens.push_back(parse_cycles("(1 ~" + std::to_string(b) + ")(" + std::to_string(b) + " ~1)", k));
      gens.push_back(parse_cycles("(1 ~1)(" + std::to_string(b) + " ~" + std::to_string(b) + ")", k));
    }
    if (gens.empty()) {
      BigInt n = k >= 4 ? cen.count_of({false, id_p, padded_partition(k, {2, 2})}) : BigInt(0);
      rep.clauses.push_back({"irreg-id-22-family", n == 0, "vacuous range, count = " + n.str()});
    } else {
      rep.clauses.push_back(detail::check_family(
          "irreg-id-22-family", cen, gens, {false, id_p, padded_partition(k, {2, 2})},
          BigInt(k) * k * (k - 3), /*expected_multiplicity=*/2));
    }
  }

  // Irreg(id, 3^1) = {s^n (1 1~)(2 2~) s^m}, k^2; at k=2 the family is
  // entirely chi = 0 and the class cannot exist
  {
    Permutation g = parse_cycles("(1 ~1)(2 ~2)", k);
    if (k >= 3) {
      rep.clauses.push_back(detail::check_family("irreg-id-3-family", cen, {g},
                                                 {false, id_p, padded_partition(k, {3})},
                                                 BigInt(k) * k));
    } else {
      bool all_zero = true;
      for (const auto& w : detail::shift_family(g))
        if (membership(w)) all_zero = false;
      rep.clauses.push_back({"irreg-id-3-family", all_zero,
                             "degenerate at k=2: family members are non-contributing"});
    }
  }
  return rep;
}

/// Throwing wrapper: LemmaViolation names the first failing clause.
inline LemmaReport verify_lemmas_or_throw(const ClassCensus& cen) {
  LemmaReport rep = verify_lemmas(cen);
  for (const auto& c : rep.clauses)
    if (!c.pass) throw LemmaViolation(c.name + ": " + c.detail);
  return rep;
}

/// Left-hand side of the regular-count identity extracted from the 1/N^2
/// order of the CUE expansion; zero when the census is consistent.
inline BigInt regular_identity_check(const ClassCensus& cen) {
  const int k = cen.k;
  Partition id_p = ones_partition(k);
  auto count = [&](std::initializer_list<int> alpha, std::initializer_list<int> beta) -> BigInt {
    int sa = 0, sb = 0;
    for (int x : alpha) sa += x;
    for (int x : beta) sb += x;
    if (sa > k || sb > k) return BigInt(0);  // class cannot exist at this k
    return cen.count_of({true, padded_partition(k, alpha), padded_partition(k, beta)});
  };
  BigInt lhs = BigInt(k) * k * (k - 1) / 2;
  lhs += count({}, {2, 2});
  lhs += count({}, {3});
  lhs -= count({2}, {2});
  lhs += 2 * count({3}, {});
  lhs += count({2, 2}, {});
  return lhs;
}

/// Census counts folded onto the moment aggregation keys (alpha, #parts(beta)).
inline std::map<std::pair<Partition, int>, BigInt> census_to_moment_counts(const ClassCensus& cen) {
  std::map<std::pair<Partition, int>, BigInt> counts;
  for (const auto& [key, entry] : cen.table)
    counts[{key.alpha, static_cast<int>(key.beta.size())}] += entry.count;
  return counts;
}

inline nlohmann::json to_json(const ClassCensus& cen) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& [key, entry] : cen.table) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& w : entry.samples) samples.push_back(render_cycles(w));
    classes.push_back({{"regular", key.regular},
                       {"alpha", partition_to_dash(key.alpha)},
                       {"beta", partition_to_dash(key.beta)},
                       {"count", entry.count.str()},
                       {"samples", samples}});
  }
  return nlohmann::json{{"k", cen.k},
                        {"chi_zero", cen.chi_zero},
                        {"total", cen.total},
                        {"sample_cap", cen.sample_cap},
                        {"classes", classes}};
}

}  // namespace twirl
