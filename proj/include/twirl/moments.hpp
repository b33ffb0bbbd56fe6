#pragma once

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/graph_model.hpp"
#include "twirl/partition.hpp"
#include "twirl/permutation.hpp"
#include "twirl/rational_function.hpp"
#include "twirl/weingarten.hpp"

namespace twirl {

struct MomentOptions {
  int max_k = 5;              // hard budget; 6 only behind allow_k6
  bool allow_k6 = false;
  int threads = 0;            // 0 = hardware concurrency
  bool coset_speedup = false;  // enumerate coset representatives, scale by k
  int tail_order = 4;
  std::string cache_dir = default_cache_dir();  // empty string disables caching
  // invoked as enumeration advances (done, total); minutes-scale runs only
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

/// Aggregated enumeration result: c(alpha, m) such that
/// M_k(N) = sum c(alpha,m) Wg^COE(alpha) N^m, plus the assembled function.
struct MomentReport {
  int k = 0;
  std::map<std::pair<Partition, int>, BigInt> counts;
  RationalFunction moment;
  SeriesTail tail;
  struct Meta {
    std::uint64_t visited = 0;
    std::uint64_t chi_zero = 0;
    double wall_seconds = 0;
    int threads = 1;
    bool coset_speedup = false;
    bool cache_hit = false;
  } meta;
};

namespace detail {

/// Packed multiset key: 4 bits of multiplicity per part length.
inline std::uint64_t partition_key(const Partition& p) {
  std::uint64_t key = 0;
  for (int part : p) key += std::uint64_t(1) << (4 * (part - 1));
  return key;
}

struct CountGrid {
  int k = 0;
  std::vector<Partition> parts;
  std::unordered_map<std::uint64_t, int> key_to_index;
  std::vector<std::uint64_t> cells;  // parts.size() * (k+1), index [p][m]
  std::uint64_t chi_zero = 0;

  explicit CountGrid(int kk) : k(kk), parts(partitions_of(kk)) {
    for (std::size_t i = 0; i < parts.size(); ++i)
      key_to_index[partition_key(parts[i])] = static_cast<int>(i);
    cells.assign(parts.size() * static_cast<std::size_t>(k + 1), 0);
  }

  void merge(const CountGrid& o) {
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += o.cells[i];
    chi_zero += o.chi_zero;
  }
};

/// Classify one image array and tally it: alpha = half-type of [w,T],
/// m = number of directed cycles, gated by chi.
inline void tally_one(const std::uint8_t* img, int k, CountGrid& grid, std::uint64_t weight = 1) {
  const int n = 2 * k;
  std::uint8_t inv[32];
  for (int z = 0; z < n; ++z) inv[img[z]] = static_cast<std::uint8_t>(z);
  int parts_buf[32], m = 0;
  int chi = directed_cycle_scan(img, inv, k, parts_buf, &m);
  if (!chi) {
    grid.chi_zero += weight;
    return;
  }
  int lens[32];
  int nc = comm_t_cycle_lengths(img, inv, k, lens);
  std::uint8_t mult[33] = {0};
  for (int i = 0; i < nc; ++i) ++mult[lens[i]];
  std::uint64_t key = 0;
  for (int l = 1; l <= n; ++l)
    if (mult[l]) key += std::uint64_t(mult[l] / 2) << (4 * (l - 1));
  int pidx = grid.key_to_index.at(key);
  grid.cells[static_cast<std::size_t>(pidx) * (k + 1) + static_cast<std::size_t>(m)] += weight;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Enumerate all of S_2k (or the coset transversal) into a CountGrid,
/// data-parallel over fixed contiguous chunks merged in chunk order.
inline CountGrid enumerate_counts(int k, bool coset, int threads,
                                  const std::function<void(std::uint64_t, std::uint64_t)>& progress) {
  CountGrid total(k);
  if (coset) {
    // transversal is (2k)!/k items; scaled by k on the fly
    const std::uint64_t n_items = factorial(2 * k) / static_cast<std::uint64_t>(k);
    std::uint64_t seen = 0;
    enumerate_coset_reps(k, [&](const std::vector<std::uint8_t>& img) {
      tally_one(img.data(), k, total, static_cast<std::uint64_t>(k));
      if (progress && (++seen & 0x3FFFFF) == 0) progress(seen, n_items);
    });
    if (progress) progress(n_items, n_items);
    return total;
  }
  const std::uint64_t n_items = factorial(2 * k);
  const int nthreads = resolve_threads(threads);
  const std::uint64_t n_chunks = std::min<std::uint64_t>(64, n_items);
  std::vector<CountGrid> partials(n_chunks, CountGrid(k));
  std::atomic<std::uint64_t> chunks_done{0};
  auto worker = [&](int w) {
    for (std::uint64_t c = static_cast<std::uint64_t>(w); c < n_chunks; c += static_cast<std::uint64_t>(nthreads)) {
      std::uint64_t begin = n_items * c / n_chunks;
      std::uint64_t end = n_items * (c + 1) / n_chunks;
      enumerate_images_range(2 * k, begin, end, [&](const std::vector<std::uint8_t>& img) {
        tally_one(img.data(), k, partials[c]);
      });
      std::uint64_t done = chunks_done.fetch_add(1) + 1;
      if (progress) progress(done, n_chunks);
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& p : partials) total.merge(p);
  return total;
}

}  // namespace detail

/// Exact M_k(N) by exhaustive enumeration of S_2k with (alpha, m) class
/// aggregation, assembled against the COE Weingarten table.
inline MomentReport coe_moment(int k, const MomentOptions& opts = {}) {
  if (k < 1) throw OutOfRange("k must be >= 1");
  int cap = opts.allow_k6 ? std::max(opts.max_k, 6) : opts.max_k;
  if (k > cap || k > 6)
    throw BudgetExceeded("k=" + std::to_string(k) + " exceeds the enumeration budget" +
                         (k == 6 ? " (pass allow_k6)" : ""));
  auto t0 = std::chrono::steady_clock::now();

  detail::CountGrid grid =
      detail::enumerate_counts(k, opts.coset_speedup, opts.threads, opts.progress);

  MomentReport rep;
  rep.k = k;
  rep.meta.visited = factorial(2 * k);
  rep.meta.chi_zero = grid.chi_zero;
  rep.meta.threads = opts.coset_speedup ? 1 : detail::resolve_threads(opts.threads);
  rep.meta.coset_speedup = opts.coset_speedup;

  CacheResult cr = opts.cache_dir.empty()
                       ? CacheResult{coe_table(k), false}
                       : load_or_build_table(Ensemble::COE, k, opts.cache_dir);
  rep.meta.cache_hit = cr.cache_hit;

  RationalFunction m;
  for (std::size_t p = 0; p < grid.parts.size(); ++p) {
    for (int e = 0; e <= k; ++e) {
      std::uint64_t c = grid.cells[p * static_cast<std::size_t>(k + 1) + static_cast<std::size_t>(e)];
      if (!c) continue;
      rep.counts[{grid.parts[p], e}] = BigInt(c);
      std::vector<BigInt> mono(static_cast<std::size_t>(e + 1));
      mono[static_cast<std::size_t>(e)] = BigInt(c);
      m += RationalFunction(Polynomial(std::move(mono)), Polynomial::constant(1)) *
           cr.table.at(grid.parts[p]);
    }
  }
  rep.moment = m;
  rep.tail = series_in_inverse_n(rep.moment, opts.tail_order);
  rep.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// The CUE cross-check: the same Phi machinery summed over the regular
/// permutations (sigma, pi), keyed by the cycle type of sigma^{-1} pi against
/// the CUE table.  Equals the constant k as an identity of rational functions.
inline RationalFunction cue_moment_via_weingarten(int k, const MomentOptions& opts = {}) {
  if (k < 1) throw OutOfRange("k must be >= 1");
  if (k > 6) throw BudgetExceeded("k exceeds the enumeration budget");

  std::vector<Partition> parts = partitions_of(k);
  std::map<Partition, std::size_t> index;
  for (std::size_t i = 0; i < parts.size(); ++i) index[parts[i]] = i;
  std::vector<std::vector<std::uint64_t>> counts(parts.size(),
                                                 std::vector<std::uint64_t>(static_cast<std::size_t>(k + 1), 0));

  std::vector<int> sigma(static_cast<std::size_t>(k));
  std::iota(sigma.begin(), sigma.end(), 0);
  std::uint8_t img[32];
  std::uint8_t inv[32];
  do {
    std::vector<int> sigma_inv(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) sigma_inv[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = i;
    std::vector<int> pi(static_cast<std::size_t>(k));
    std::iota(pi.begin(), pi.end(), 0);
    do {
      for (int b = 0; b < k; ++b) {
        img[2 * b] = static_cast<std::uint8_t>(2 * sigma[static_cast<std::size_t>(b)]);
        img[2 * b + 1] = static_cast<std::uint8_t>(2 * pi[static_cast<std::size_t>(b)] + 1);
      }
      for (int z = 0; z < 2 * k; ++z) inv[img[z]] = static_cast<std::uint8_t>(z);
      int parts_buf[32], m = 0;
      int chi = detail::directed_cycle_scan(img, inv, k, parts_buf, &m);
      if (chi) {
        std::vector<int> comp(static_cast<std::size_t>(k));
        for (int x = 0; x < k; ++x)
          comp[static_cast<std::size_t>(x)] = sigma_inv[static_cast<std::size_t>(pi[static_cast<std::size_t>(x)])];
        Partition lambda = detail::cycle_type_of_images(comp);
        ++counts[index.at(lambda)][static_cast<std::size_t>(m)];
      }
    } while (std::next_permutation(pi.begin(), pi.end()));
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  CacheResult cr = opts.cache_dir.empty()
                       ? CacheResult{cue_table(k), false}
                       : load_or_build_table(Ensemble::CUE, k, opts.cache_dir);
  RationalFunction m;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (int e = 0; e <= k; ++e) {
      std::uint64_t c = counts[p][static_cast<std::size_t>(e)];
      if (!c) continue;
      std::vector<BigInt> mono(static_cast<std::size_t>(e + 1));
      mono[static_cast<std::size_t>(e)] = BigInt(c);
      m += RationalFunction(Polynomial(std::move(mono)), Polynomial::constant(1)) * cr.table.at(parts[p]);
    }
  }
  return m;
}

struct TailCoefficients {
  BigRat c1, c2, c3;  // coefficients of 1/N, 1/N^2, 1/N^3 of moment - k
};

/// The convergence-rate content: c1 = c2 = 0 exactly.
inline TailCoefficients tail_check(const MomentReport& rep) {
  RationalFunction diff = rep.moment - RationalFunction::constant(BigInt(rep.k));
  if (diff.is_zero()) return {BigRat(0), BigRat(0), BigRat(0)};
  SeriesTail s = series_in_inverse_n(diff, 4);
  auto coeff = [&](long p) { return p < s.start_power + s.order() ? s.coeff_of(p) : BigRat(0); };
  return {coeff(1), coeff(2), coeff(3)};
}

/// Exact rational evaluation at integer N.
inline BigRat evaluate_moment(const MomentReport& rep, int N) {
  return rep.moment.evaluate(BigRat(N));
}

inline nlohmann::json to_json(const MomentReport& rep) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [key, c] : rep.counts)
    counts[partition_to_dash(key.first) + "|" + std::to_string(key.second)] = c.str();
  return nlohmann::json{
      {"k", rep.k},
      {"counts", counts},
      {"moment", to_json(rep.moment)},
      {"tail", to_json(rep.tail)},
      {"meta",
       {{"visited", rep.meta.visited},
        {"chi_zero", rep.meta.chi_zero},
        {"wall_seconds", rep.meta.wall_seconds},
        {"threads", rep.meta.threads},
        {"coset_speedup", rep.meta.coset_speedup},
        {"cache_hit", rep.meta.cache_hit}}}};
}

inline std::string counts_csv(const MomentReport& rep) {
  std::string out = "k,alpha,m,count\n";
  for (const auto& [key, c] : rep.counts)
    out += std::to_string(rep.k) + "," + partition_to_dash(key.first) + "," +
           std::to_string(key.second) + "," + c.str() + "\n";
  return out;
}

}  // namespace twirl
