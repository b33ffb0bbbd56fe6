#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/permutation.hpp"

namespace twirl {

enum class EdgeStyle : std::uint8_t { solid, dashed };

/// One edge of the graph model; for directed edges the arrow runs a -> b.
struct GraphEdge {
  std::uint8_t a, b;
  EdgeStyle style;
  bool directed;
};

/// The 4-regular edge-labeled multigraph of a permutation: per symbol b, an
/// undirected solid edge b -- b~, a directed solid edge b~ -> b+1, an
/// undirected dashed edge w(b) -- w(b~), and a directed dashed edge
/// w(b~) -> w(b+1).  Multi-edges are stored as distinct entries.
struct GraphModel {
  int k;
  std::vector<GraphEdge> edges;
};

inline GraphModel build_graph(const Permutation& w) {
  const int k = w.k();
  GraphModel g{k, {}};
  g.edges.reserve(static_cast<std::size_t>(4 * k));
  for (int b = 1; b <= k; ++b) {
    auto u = static_cast<std::uint8_t>(slot_of({b, false}));
    auto ub = static_cast<std::uint8_t>(slot_of({b, true}));
    auto un = static_cast<std::uint8_t>(slot_of({cyclic_next(b, k), false}));
    g.edges.push_back({u, ub, EdgeStyle::solid, false});
    g.edges.push_back({ub, un, EdgeStyle::solid, true});
    g.edges.push_back({static_cast<std::uint8_t>(w(u)), static_cast<std::uint8_t>(w(ub)),
                       EdgeStyle::dashed, false});
    g.edges.push_back({static_cast<std::uint8_t>(w(ub)), static_cast<std::uint8_t>(w(un)),
                       EdgeStyle::dashed, true});
  }
  return g;
}

struct UndirectedCycle {
  int length;  // edge count, always even
  std::vector<std::uint8_t> vertices;
};

struct DirectedCycle {
  int length;
  std::vector<std::uint8_t> vertices;
  bool balanced;  // equally many edges in each orientation around the cycle
};

struct CycleReport {
  std::vector<UndirectedCycle> undirected_cycles;
  std::vector<DirectedCycle> directed_cycles;

  bool all_balanced() const {
    for (const auto& c : directed_cycles)
      if (!c.balanced) return false;
    return true;
  }
};

/// Decompose the undirected and the directed subgraphs into their
/// solid/dashed-alternating cycles, tallying orientation balance for the
/// directed ones.
inline CycleReport cycle_report(const GraphModel& g) {
  const int n = 2 * g.k;
  // per-vertex incidences; exactly one edge of each kind per vertex
  std::vector<int> solid_u(static_cast<std::size_t>(n), -1), dashed_u(static_cast<std::size_t>(n), -1);
  std::vector<int> solid_d(static_cast<std::size_t>(n), -1), dashed_d(static_cast<std::size_t>(n), -1);
  std::vector<int> solid_out(static_cast<std::size_t>(n), 0), dashed_out(static_cast<std::size_t>(n), 0);
  for (const auto& e : g.edges) {
    auto& partner = e.style == EdgeStyle::solid ? (e.directed ? solid_d : solid_u)
                                                : (e.directed ? dashed_d : dashed_u);
    partner[e.a] = e.b;
    partner[e.b] = e.a;
    if (e.directed) {
      auto& out = e.style == EdgeStyle::solid ? solid_out : dashed_out;
      out[e.a] = +1;
      out[e.b] = -1;
    }
  }

  CycleReport rep;
  auto sweep = [n](const std::vector<int>& solid, const std::vector<int>& dashed,
                   auto&& per_cycle) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int z0 = 0; z0 < n; ++z0) {
      if (seen[static_cast<std::size_t>(z0)]) continue;
      std::vector<std::uint8_t> verts;
      int z = z0;
      bool via_solid = true;
      do {
        seen[static_cast<std::size_t>(z)] = true;
        verts.push_back(static_cast<std::uint8_t>(z));
        z = via_solid ? solid[static_cast<std::size_t>(z)] : dashed[static_cast<std::size_t>(z)];
        via_solid = !via_solid;
      } while (z != z0 || !via_solid);
      per_cycle(std::move(verts));
    }
  };

  sweep(solid_u, dashed_u, [&](std::vector<std::uint8_t> verts) {
    rep.undirected_cycles.push_back({static_cast<int>(verts.size()), std::move(verts)});
  });
  sweep(solid_d, dashed_d, [&](std::vector<std::uint8_t> verts) {
    // re-walk to tally orientations: leaving z via its solid (resp. dashed)
    // directed edge counts +1 when the arrow points away from z
    int bal = 0;
    bool via_solid = true;
    for (auto z : verts) {
      bal += via_solid ? solid_out[z] : dashed_out[z];
      via_solid = !via_solid;
    }
    rep.directed_cycles.push_back({static_cast<int>(verts.size()), std::move(verts), bal == 0});
  });
  return rep;
}

namespace detail {

/// Directed-cycle scan straight off the image arrays (no graph object).
/// Returns chi (all cycles balanced) and fills `half_lengths` with the
/// per-cycle edge-pair counts, i.e. the half-type parts of [omega,Q].
/// Buffers must hold 2k entries.
inline int directed_cycle_scan(const std::uint8_t* img, const std::uint8_t* inv, int k,
                               int* half_lengths, int* num_cycles) {
  const int n = 2 * k;
  std::uint32_t seen = 0;  // n <= 32
  int chi = 1, cycles = 0;
  for (int z0 = 0; z0 < n; ++z0) {
    if (seen & (1u << z0)) continue;
    int z = z0, bal = 0, steps = 0;
    do {
      seen |= 1u << z;
      // solid directed edge at z
      if ((z & 1) == 0) {  // unbarred c: edge (c-1)~ -> c, move against
        int c = z / 2 + 1;
        z = 2 * (cyclic_prev(c, k) - 1) + 1;
        --bal;
      } else {  // barred c: edge c~ -> c+1, move along
        int c = (z - 1) / 2 + 1;
        z = 2 * (cyclic_next(c, k) - 1);
        ++bal;
      }
      seen |= 1u << z;
      // dashed directed edge at z: w(b~) -> w(b+1)
      int y = inv[z];
      if ((y & 1) == 0) {  // z = w(c): edge w((c-1)~) -> z, move against
        int c = y / 2 + 1;
        z = img[2 * (cyclic_prev(c, k) - 1) + 1];
        --bal;
      } else {  // z = w(c~): edge z -> w(c+1), move along
        int c = (y - 1) / 2 + 1;
        z = img[2 * (cyclic_next(c, k) - 1)];
        ++bal;
      }
      ++steps;
    } while (z != z0);
    half_lengths[cycles++] = steps;
    if (bal != 0) chi = 0;
  }
  *num_cycles = cycles;
  return chi;
}

/// Cycle lengths of [omega,T] computed in place; returns the number of
/// cycles.  Buffers must hold 2k entries.
inline int comm_t_cycle_lengths(const std::uint8_t* img, const std::uint8_t* inv, int k,
                                int* lengths) {
  const int n = 2 * k;
  std::uint8_t comm[32];
  for (int z = 0; z < n; ++z) {
    // [w,T](z) = w(T(w^{-1}(T(z)))), T swaps slot pairs
    int t = z ^ 1;
    int y = inv[t] ^ 1;
    comm[z] = img[y];
  }
  std::uint32_t seen = 0;
  int cnt = 0;
  for (int z0 = 0; z0 < n; ++z0) {
    if (seen & (1u << z0)) continue;
    int len = 0, z = z0;
    do {
      seen |= 1u << z;
      z = comm[z];
      ++len;
    } while (z != z0);
    lengths[cnt++] = len;
  }
  return cnt;
}

}  // namespace detail

struct PhiValue {
  int chi;         // 0 or 1
  int half_ell_q;  // half the cycle count of [omega,Q]; Phi = chi * N^half_ell_q
};

/// Phi(omega) in closed form: chi_omega and the exponent half ell[omega,Q].
inline PhiValue phi(const Permutation& w) {
  if (w.k() > 16) throw OutOfRange("graph analysis supports k <= 16");
  Permutation inv_w = inverse(w);
  int parts[32], cycles = 0;
  int chi = detail::directed_cycle_scan(w.images().data(), inv_w.images().data(), w.k(), parts,
                                        &cycles);
  return {chi, cycles};
}

/// Indicator that every directed cycle of the graph model is balanced.
inline int chi(const Permutation& w) { return phi(w).chi; }

// ---- admissible twist library (permutations of [0..N-1]) ----

inline std::vector<int> grand_cycle_perm(int N) {
  std::vector<int> p(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) p[static_cast<std::size_t>(i)] = (i + 1) % N;
  return p;
}

/// Two cycles of lengths ceil(N/2), floor(N/2); each exceeds 2k when N > 4k+2.
inline std::vector<int> two_cycle_perm(int N) {
  std::vector<int> p(static_cast<std::size_t>(N));
  int c1 = (N + 1) / 2;
  for (int i = 0; i < c1; ++i) p[static_cast<std::size_t>(i)] = (i + 1) % c1;
  for (int i = c1; i < N; ++i) p[static_cast<std::size_t>(i)] = c1 + (i + 1 - c1) % (N - c1);
  return p;
}

/// The pairing involution (1 2)(3 4)...; requires even N.
inline std::vector<int> involution_perm(int N) {
  if (N % 2 != 0) throw OutOfRange("pairing involution needs even N");
  std::vector<int> p(static_cast<std::size_t>(N));
  for (int i = 0; i < N; i += 2) {
    p[static_cast<std::size_t>(i)] = i + 1;
    p[static_cast<std::size_t>(i + 1)] = i;
  }
  return p;
}

inline std::vector<int> identity_perm(int N) {
  std::vector<int> p(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

inline int min_cycle_length(const std::vector<int>& p) {
  std::vector<bool> seen(p.size(), false);
  int best = static_cast<int>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = static_cast<std::size_t>(p[j]);
      ++len;
    }
    best = std::min(best, len);
  }
  return best;
}

/// Brute-force count of {I in F_N : I o omega in F_N} by enumerating the N^k
/// free barred indices; the unbarred ones are determined by the twist
/// constraint.  Exact reference for phi().
inline std::uint64_t phi_oracle(const Permutation& w, int N, const std::vector<int>& P,
                                std::uint64_t budget = 200'000'000ULL) {
  const int k = w.k();
  if (static_cast<int>(P.size()) != N) throw DimensionMismatch("twist size != N");
  double work = 1;
  for (int i = 0; i < k; ++i) work *= N;
  if (work > static_cast<double>(budget))
    throw Infeasible("oracle enumeration of N^k = " + std::to_string(work) +
                     " tuples exceeds budget");

  std::vector<int> bar_vals(static_cast<std::size_t>(k), 0);  // i_{1~},...,i_{k~}
  std::vector<int> idx(static_cast<std::size_t>(2 * k), 0);   // I by slot
  std::uint64_t count = 0;
  while (true) {
    for (int b = 1; b <= k; ++b) {
      int v = bar_vals[static_cast<std::size_t>(b - 1)];
      idx[static_cast<std::size_t>(slot_of({b, true}))] = v;
      idx[static_cast<std::size_t>(slot_of({cyclic_next(b, k), false}))] = P[static_cast<std::size_t>(v)];
    }
    bool ok = true;
    for (int b = 1; b <= k && ok; ++b) {
      int jb = idx[static_cast<std::size_t>(w(slot_of({b, true})))];
      int jn = idx[static_cast<std::size_t>(w(slot_of({cyclic_next(b, k), false})))];
      ok = P[static_cast<std::size_t>(jb)] == jn;
    }
    if (ok) ++count;
    int pos = k - 1;
    while (pos >= 0 && ++bar_vals[static_cast<std::size_t>(pos)] == N)
      bar_vals[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return count;
}

/// The unproven algebraic characterization: chi = 1 iff every orbit O of
/// [omega,Q] has as many barred symbols as omega^{-1}(O) does.  Cross-check
/// only; chi() is authoritative.
inline int chi_algebraic(const Permutation& w) {
  Permutation c = commutator(w, fixed_Q(w.k()));
  Permutation winv = inverse(w);
  const int n = w.size();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int z0 = 0; z0 < n; ++z0) {
    if (seen[static_cast<std::size_t>(z0)]) continue;
    int barred_orbit = 0, barred_pre = 0;
    int z = z0;
    do {
      seen[static_cast<std::size_t>(z)] = true;
      if (z & 1) ++barred_orbit;
      if (winv(z) & 1) ++barred_pre;
      z = c(z);
    } while (z != z0);
    if (barred_orbit != barred_pre) return 0;
  }
  return 1;
}

/// Deterministic DOT rendering; undirected edges carry dir=none.
inline std::string export_dot(const GraphModel& g) {
  std::string out = "digraph G {\n";
  for (int z = 0; z < 2 * g.k; ++z)
    out += "  \"" + symbol_to_string(symbol_at(z)) + "\";\n";
  for (const auto& e : g.edges) {
    out += "  \"" + symbol_to_string(symbol_at(e.a)) + "\" -> \"" +
           symbol_to_string(symbol_at(e.b)) + "\" [style=" +
           (e.style == EdgeStyle::solid ? "solid" : "dashed");
    if (!e.directed) out += ", dir=none";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace twirl
