#pragma once

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/linear_solve.hpp"
#include "twirl/partition.hpp"
#include "twirl/permutation.hpp"
#include "twirl/rational_function.hpp"

namespace twirl {

enum class Ensemble { CUE, COE };

inline std::string ensemble_name(Ensemble e) { return e == Ensemble::CUE ? "CUE" : "COE"; }

/// Exact Weingarten functions of one ensemble at one k, indexed by the
/// partitions of k (cycle type for CUE, commutator half-type for COE).
struct WeingartenTable {
  Ensemble ensemble = Ensemble::CUE;
  int k = 0;
  std::map<Partition, RationalFunction> entries;

  const RationalFunction& at(const Partition& p) const {
    auto it = entries.find(p);
    if (it == entries.end())
      throw KeyMissing("no entry for partition " + partition_to_dash(p) + " in " +
                       ensemble_name(ensemble) + " k=" + std::to_string(k) + " table");
    return it->second;
  }
};

namespace detail {

/// Cycle type (as a Partition) of a permutation of [0..n) given as images.
inline Partition cycle_type_of_images(const std::vector<int>& img) {
  std::vector<bool> seen(img.size(), false);
  Partition parts;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = static_cast<std::size_t>(img[j]);
      ++len;
    }
    parts.push_back(len);
  }
  std::sort(parts.rbegin(), parts.rend());
  return parts;
}

/// sigma_lambda in S_k: parts laid out left to right as cycles, so the
/// symbol k sits in the last part.  `last` rotates which part goes last
/// (0 = canonical layout) for alternative-representative equations.
inline std::vector<int> cue_representative(const Partition& lambda, int k, std::size_t last = 0) {
  Partition parts = lambda;
  if (last > 0 && last < parts.size()) {
    std::rotate(parts.begin() + static_cast<std::ptrdiff_t>(last), parts.begin() + static_cast<std::ptrdiff_t>(last) + 1,
                parts.end());
  }
  std::vector<int> img(static_cast<std::size_t>(k));
  int pos = 0;
  for (int part : parts) {
    for (int i = 0; i < part; ++i)
      img[static_cast<std::size_t>(pos + i)] = pos + (i + 1) % part;
    pos += part;
  }
  return img;
}

/// The regular permutation (sigma_lambda, id) acting on the 2k slots.
inline Permutation coe_representative(const Partition& lambda, int k, std::size_t last = 0) {
  std::vector<int> sigma = cue_representative(lambda, k, last);
  std::vector<std::uint8_t> img(static_cast<std::size_t>(2 * k));
  for (int b = 0; b < k; ++b) {
    img[static_cast<std::size_t>(2 * b)] = static_cast<std::uint8_t>(2 * sigma[static_cast<std::size_t>(b)]);
    img[static_cast<std::size_t>(2 * b + 1)] = static_cast<std::uint8_t>(2 * b + 1);
  }
  return Permutation::from_images(k, std::move(img));
}

struct WgEquation {
  std::map<Partition, BigInt> lhs_const;  // constant coefficients
  std::map<Partition, BigInt> lhs_n;      // coefficients of N
  RationalFunction rhs;
};

/// One orthogonality relation instantiated at a representative.
inline WgEquation cue_equation(const Partition& lambda, int k, const WeingartenTable& prev,
                               std::size_t last = 0) {
  std::vector<int> sigma = cue_representative(lambda, k, last);
  WgEquation eq;
  eq.lhs_n[cycle_type_of_images(sigma)] += 1;
  for (int i = 0; i < k - 1; ++i) {
    std::vector<int> t = sigma;  // (i k) o sigma: swap values i and k-1
    for (auto& v : t)
      if (v == i)
        v = k - 1;
      else if (v == k - 1)
        v = i;
    eq.lhs_const[cycle_type_of_images(t)] += 1;
  }
  if (sigma[static_cast<std::size_t>(k - 1)] == k - 1) {
    std::vector<int> down(sigma.begin(), sigma.end() - 1);
    eq.rhs = prev.at(cycle_type_of_images(down));
  }
  return eq;
}

inline WgEquation coe_equation(const Partition& lambda, int k, const WeingartenTable& prev,
                               std::size_t last = 0) {
  Permutation w = coe_representative(lambda, k, last);
  Permutation T = fixed_T(k);
  auto ht = [&](const Permutation& p) { return half_type(commutator(p, T)); };
  WgEquation eq;
  eq.lhs_n[ht(w)] += 1;
  eq.lhs_const[ht(w)] += 1;  // (N+1) coefficient
  const int top_u = 2 * (k - 1), top_b = 2 * (k - 1) + 1;
  for (int z = 1; z <= k - 1; ++z) {
    for (int zslot : {2 * (z - 1), 2 * (z - 1) + 1}) {
      // (zslot top_u) o w: swap the two values in the image array
      std::vector<std::uint8_t> img = w.images();
      for (auto& v : img)
        if (v == zslot)
          v = static_cast<std::uint8_t>(top_u);
        else if (v == top_u)
          v = static_cast<std::uint8_t>(zslot);
      eq.lhs_const[ht(Permutation::from_images(k, std::move(img)))] += 1;
    }
  }
  // delta: w leaves {k, k~} invariant; the interleaved slot encoding puts
  // k and k~ in the top two slots, so the projection just drops them
  bool fixes = (w(top_u) == top_u && w(top_b) == top_b) || (w(top_u) == top_b && w(top_b) == top_u);
  if (fixes) {
    if (k == 1) {
      eq.rhs = prev.at(Partition{});
    } else {
      std::vector<std::uint8_t> img(w.images().begin(), w.images().end() - 2);
      Permutation down = Permutation::from_images(k - 1, std::move(img));
      eq.rhs = prev.at(half_type(commutator(down, fixed_T(k - 1))));
    }
  }
  return eq;
}

inline WeingartenTable build_table_level(Ensemble e, int k, const WeingartenTable& prev) {
  std::vector<Partition> parts = partitions_of(k);
  std::map<Partition, std::size_t> index;
  for (std::size_t i = 0; i < parts.size(); ++i) index[parts[i]] = i;
  const std::size_t n = parts.size();

  auto make_row = [&](const WgEquation& eq, std::vector<RationalFunction>& row, RationalFunction& rhs) {
    row.assign(n, RationalFunction());
    Polynomial var = Polynomial::variable();
    for (const auto& [p, c] : eq.lhs_n)
      row[index.at(p)] += RationalFunction(var * c, Polynomial::constant(1));
    for (const auto& [p, c] : eq.lhs_const) row[index.at(p)] += RationalFunction::constant(c);
    rhs = eq.rhs;
  };

  auto equation = [&](const Partition& lambda, std::size_t last) {
    return e == Ensemble::CUE ? cue_equation(lambda, k, prev, last)
                              : coe_equation(lambda, k, prev, last);
  };

  std::vector<std::vector<RationalFunction>> A(n, std::vector<RationalFunction>(n));
  std::vector<RationalFunction> b(n);
  for (std::size_t i = 0; i < n; ++i) make_row(equation(parts[i], 0), A[i], b[i]);

  std::vector<RationalFunction> x;
  try {
    x = solve_linear_system(A, b);
  } catch (const SingularSystem&) {
    // widen with alternative representatives (k placed in each other part)
    std::vector<std::vector<RationalFunction>> M = A;
    std::vector<RationalFunction> rhs = b;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t last = 1; last < parts[i].size(); ++last) {
        std::vector<RationalFunction> row;
        RationalFunction r;
        make_row(equation(parts[i], last), row, r);
        M.push_back(std::move(row));
        rhs.push_back(std::move(r));
      }
    }
    x = solve_rectangular_system(std::move(M), std::move(rhs), n);
  }

  WeingartenTable t;
  t.ensemble = e;
  t.k = k;
  for (std::size_t i = 0; i < n; ++i) t.entries[parts[i]] = x[i];
  return t;
}

}  // namespace detail

/// Bottom-up chain of tables for 1..k (index i holds level i; level 0 is the
/// empty-product anchor).
inline std::vector<WeingartenTable> weingarten_tables_up_to(Ensemble e, int k) {
  std::vector<WeingartenTable> chain;
  WeingartenTable base;
  base.ensemble = e;
  base.k = 0;
  base.entries[Partition{}] = RationalFunction::constant(BigInt(1));
  chain.push_back(std::move(base));
  for (int kk = 1; kk <= k; ++kk)
    chain.push_back(detail::build_table_level(e, kk, chain.back()));
  return chain;
}

inline WeingartenTable cue_table(int k) {
  return std::move(weingarten_tables_up_to(Ensemble::CUE, k).back());
}

inline WeingartenTable coe_table(int k) {
  return std::move(weingarten_tables_up_to(Ensemble::COE, k).back());
}

/// Table lookup for omega in S_2k, keyed by the half-type of [omega,T].
/// Only valid against a COE table.
inline const RationalFunction& wg_of_perm(const WeingartenTable& t, const Permutation& omega) {
  if (t.ensemble != Ensemble::COE)
    throw KeyMissing("permutations of the 2k-symbol set key into COE tables");
  if (omega.k() != t.k) throw KeyMissing("table is for k=" + std::to_string(t.k));
  return t.at(half_type(commutator(omega, fixed_T(omega.k()))));
}

/// Table lookup for sigma in S_k given as an image array, keyed by cycle
/// type.  Only valid against a CUE table.
inline const RationalFunction& wg_of_perm(const WeingartenTable& t, const std::vector<int>& sigma) {
  if (t.ensemble != Ensemble::CUE)
    throw KeyMissing("S_k image arrays key into CUE tables");
  if (static_cast<int>(sigma.size()) != t.k) throw KeyMissing("table is for k=" + std::to_string(t.k));
  return t.at(detail::cycle_type_of_images(sigma));
}

inline SeriesTail asymptotics(const WeingartenTable& t, const Partition& lambda, int order) {
  return series_in_inverse_n(t.at(lambda), order);
}

/// Residual of the recursion at the single-cycle partition (k): self-contained
/// within one table since its delta term vanishes (k >= 2).  Zero iff the
/// table solves its defining relation.
inline RationalFunction self_residual(const WeingartenTable& t) {
  if (t.k == 1) {
    Polynomial var = Polynomial::variable();
    Polynomial shift = t.ensemble == Ensemble::CUE ? var : var + Polynomial::constant(1);
    return RationalFunction(shift, Polynomial::constant(1)) * t.at({1}) -
           RationalFunction::constant(BigInt(1));
  }
  WeingartenTable dummy_prev;  // never consulted: delta = 0 for lambda = (k)
  dummy_prev.ensemble = t.ensemble;
  dummy_prev.k = t.k - 1;
  detail::WgEquation eq = t.ensemble == Ensemble::CUE
                              ? detail::cue_equation({t.k}, t.k, dummy_prev)
                              : detail::coe_equation({t.k}, t.k, dummy_prev);
  RationalFunction acc;
  Polynomial var = Polynomial::variable();
  for (const auto& [p, c] : eq.lhs_n) acc += RationalFunction(var * c, Polynomial::constant(1)) * t.at(p);
  for (const auto& [p, c] : eq.lhs_const) acc += RationalFunction::constant(c) * t.at(p);
  return acc - eq.rhs;
}

// ---- disk cache: one JSON file per (ensemble, k) ----

inline std::string default_cache_dir() {
  if (const char* env = std::getenv("TWIRL_CACHE_DIR")) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME")) return std::string(xdg) + "/twirl";
  if (const char* home = std::getenv("HOME")) return std::string(home) + "/.cache/twirl";
  return ".twirl-cache";
}

inline nlohmann::json to_json(const WeingartenTable& t) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [p, f] : t.entries) entries[partition_to_dash(p)] = to_json(f);
  return nlohmann::json{{"ensemble", ensemble_name(t.ensemble)}, {"k", t.k}, {"entries", entries}};
}

inline WeingartenTable table_from_json(const nlohmann::json& j) {
  WeingartenTable t;
  t.ensemble = j.at("ensemble").get<std::string>() == "CUE" ? Ensemble::CUE : Ensemble::COE;
  t.k = j.at("k").get<int>();
  for (const auto& [key, val] : j.at("entries").items())
    t.entries[partition_from_dash(key, t.k)] = rational_function_from_json(val);
  return t;
}

struct CacheResult {
  WeingartenTable table;
  bool cache_hit = false;
};

/// Load the (ensemble, k) table from the cache directory, validating one
/// recursion residual; rebuild (and store) on miss or corruption.
inline CacheResult load_or_build_table(Ensemble e, int k, const std::string& cache_dir = default_cache_dir()) {
  namespace fs = std::filesystem;
  fs::path file = fs::path(cache_dir) /
                  ("wg_" + std::string(e == Ensemble::CUE ? "cue" : "coe") + "_k" + std::to_string(k) + ".json");
  if (fs::exists(file)) {
    try {
      std::ifstream in(file);
      nlohmann::json j;
      in >> j;
      WeingartenTable t = table_from_json(j);
      if (t.k == k && t.ensemble == e &&
          t.entries.size() == partitions_of(k).size() && self_residual(t).is_zero())
        return {std::move(t), true};
    } catch (const std::exception&) {
      // fall through to rebuild
    }
  }
  WeingartenTable t = e == Ensemble::CUE ? cue_table(k) : coe_table(k);
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (!ec) {
    std::ofstream out(file);
    out << to_json(t).dump(1) << "\n";
  }
  return {std::move(t), false};
}

}  // namespace twirl
