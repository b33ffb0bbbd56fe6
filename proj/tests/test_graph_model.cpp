#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "twirl/graph_model.hpp"
#include "twirl/permutation.hpp"

using namespace twirl;

namespace {

using EdgeTuple = std::tuple<int, int, int, int>;  // a, b, style, directed (undirected normalized)

std::multiset<EdgeTuple> edge_multiset(const GraphModel& g) {
  std::multiset<EdgeTuple> out;
  for (const auto& e : g.edges) {
    int a = e.a, b = e.b;
    if (!e.directed && a > b) std::swap(a, b);
    out.insert({a, b, static_cast<int>(e.style), e.directed ? 1 : 0});
  }
  return out;
}

Permutation random_perm(int k, std::mt19937_64& rng) {
  std::vector<std::uint8_t> img(static_cast<std::size_t>(2 * k));
  std::iota(img.begin(), img.end(), 0);
  std::shuffle(img.begin(), img.end(), rng);
  return Permutation::from_images(k, std::move(img));
}

std::map<int, int> length_histogram(const std::vector<UndirectedCycle>& cycles) {
  std::map<int, int> h;
  for (const auto& c : cycles) ++h[c.length];
  return h;
}

std::map<int, int> length_histogram(const std::vector<DirectedCycle>& cycles) {
  std::map<int, int> h;
  for (const auto& c : cycles) ++h[c.length];
  return h;
}

/// Independent alternation check: consecutive cycle vertices must be joined
/// by edges of alternating style within the given family.
bool alternates(const GraphModel& g, const std::vector<std::uint8_t>& verts, bool directed) {
  auto has_edge = [&](int a, int b, EdgeStyle style) {
    for (const auto& e : g.edges) {
      if (e.directed != directed || e.style != style) continue;
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return true;
    }
    return false;
  };
  const std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    EdgeStyle want = (i % 2 == 0) ? EdgeStyle::solid : EdgeStyle::dashed;
    if (!has_edge(verts[i], verts[(i + 1) % n], want)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("graph construction invariants") {
  std::mt19937_64 rng(3);
  for (int k : {1, 2, 3, 6}) {
    for (int rep = 0; rep < 20; ++rep) {
      Permutation w = random_perm(k, rng);
      GraphModel g = build_graph(w);
      REQUIRE(g.edges.size() == static_cast<std::size_t>(4 * k));
      int counts[2][2] = {{0, 0}, {0, 0}};
      std::vector<int> degree(static_cast<std::size_t>(2 * k), 0);
      std::vector<std::array<int, 4>> kinds(static_cast<std::size_t>(2 * k), {0, 0, 0, 0});
      for (const auto& e : g.edges) {
        ++counts[static_cast<int>(e.style)][e.directed ? 1 : 0];
        ++degree[e.a];
        ++degree[e.b];
        int kind = 2 * static_cast<int>(e.style) + (e.directed ? 1 : 0);
        ++kinds[e.a][static_cast<std::size_t>(kind)];
        ++kinds[e.b][static_cast<std::size_t>(kind)];
      }
      for (int s = 0; s < 2; ++s)
        for (int d = 0; d < 2; ++d) CHECK(counts[s][d] == k);
      for (int z = 0; z < 2 * k; ++z) {
        CHECK(degree[static_cast<std::size_t>(z)] == 4);
        for (int kind = 0; kind < 4; ++kind)
          CHECK(kinds[static_cast<std::size_t>(z)][static_cast<std::size_t>(kind)] == 1);
      }
    }
  }
}

TEST_CASE("identity permutation gives doubled solid structure") {
  GraphModel g = build_graph(Permutation(2));
  // dashed edges coincide with solid ones
  std::multiset<std::pair<int, int>> solid, dashed;
  for (const auto& e : g.edges) {
    int a = e.a, b = e.b;
    if (!e.directed && a > b) std::swap(a, b);
    (e.style == EdgeStyle::solid ? solid : dashed).insert({a, b});
  }
  CHECK(solid == dashed);
  CycleReport rep = cycle_report(g);
  for (const auto& c : rep.undirected_cycles) CHECK(c.length == 2);
  for (const auto& c : rep.directed_cycles) {
    CHECK(c.length == 2);
    CHECK(c.balanced);
  }
}

TEST_CASE("worked examples") {
  SECTION("omega = (1 ~4), k=6: one long cycle each way") {
    Permutation w = parse_cycles("(1 ~4)", 6);
    CycleReport rep = cycle_report(build_graph(w));
    CHECK(length_histogram(rep.undirected_cycles) == std::map<int, int>{{2, 4}, {4, 1}});
    CHECK(length_histogram(rep.directed_cycles) == std::map<int, int>{{2, 4}, {4, 1}});
    CHECK(rep.all_balanced());
  }
  SECTION("omega = s: k balanced 2-cycles each way") {
    Permutation s = fixed_s(4);
    CycleReport rep = cycle_report(build_graph(s));
    CHECK(length_histogram(rep.undirected_cycles) == std::map<int, int>{{2, 4}});
    CHECK(length_histogram(rep.directed_cycles) == std::map<int, int>{{2, 4}});
    CHECK(rep.all_balanced());
  }
  SECTION("unbalanced example: (2 ~3)(~2 3)(4 ~5)(~4 5), k=6") {
    Permutation w = parse_cycles("(2 ~3)(~2 3)(4 ~5)(~4 5)", 6);
    CycleReport rep = cycle_report(build_graph(w));
    int unbalanced = 0;
    std::set<std::set<int>> unbalanced_sets;
    for (const auto& c : rep.directed_cycles)
      if (!c.balanced) {
        ++unbalanced;
        unbalanced_sets.insert(std::set<int>(c.vertices.begin(), c.vertices.end()));
      }
    CHECK(unbalanced == 2);
    CHECK(unbalanced_sets ==
          std::set<std::set<int>>{{slot_of({2, true}), slot_of({3, false})},
                                  {slot_of({4, true}), slot_of({5, false})}});
    CHECK(chi(w) == 0);
    CHECK(phi(w).chi == 0);
  }
  SECTION("omega = (2 4)(3 5)(~2 ~4)(~3 ~5), k=6: one directed 6-cycle") {
    Permutation w = parse_cycles("(2 4)(3 5)(~2 ~4)(~3 ~5)", 6);
    CycleReport rep = cycle_report(build_graph(w));
    CHECK(length_histogram(rep.directed_cycles) == std::map<int, int>{{2, 3}, {6, 1}});
    CHECK(length_histogram(rep.undirected_cycles) == std::map<int, int>{{2, 6}});
    CHECK(rep.all_balanced());
  }
  SECTION("omega = (2 4)(3 5)(~1 ~3)(~2 ~4), k=6: one undirected 6-cycle") {
    Permutation w = parse_cycles("(2 4)(3 5)(~1 ~3)(~2 ~4)", 6);
    CycleReport rep = cycle_report(build_graph(w));
    CHECK(length_histogram(rep.undirected_cycles) == std::map<int, int>{{2, 3}, {6, 1}});
    CHECK(length_histogram(rep.directed_cycles) == std::map<int, int>{{2, 6}});
    CHECK(rep.all_balanced());
  }
  SECTION("omega = (1 ~1), k=3: one balanced directed 4-cycle") {
    Permutation w = parse_cycles("(1 ~1)", 3);
    CycleReport rep = cycle_report(build_graph(w));
    CHECK(length_histogram(rep.directed_cycles) == std::map<int, int>{{2, 1}, {4, 1}});
    CHECK(length_histogram(rep.undirected_cycles) == std::map<int, int>{{2, 3}});
    CHECK(rep.all_balanced());
    CHECK(phi(w).chi == 1);
    CHECK(phi(w).half_ell_q == 2);
  }
}

TEST_CASE("chi on regular permutations and shifts") {
  std::mt19937_64 rng(9);
  for (int k : {2, 3, 5}) {
    Permutation s = fixed_s(k);
    Permutation sn(k);
    for (int n = 0; n < k; ++n) {
      CHECK(chi(sn) == 1);
      sn = sn * s;
    }
    for (int rep = 0; rep < 20; ++rep) {
      // random regular permutation (sigma, pi)
      std::vector<std::uint8_t> img(static_cast<std::size_t>(2 * k));
      std::vector<int> sigma(static_cast<std::size_t>(k)), pi(static_cast<std::size_t>(k));
      std::iota(sigma.begin(), sigma.end(), 0);
      std::iota(pi.begin(), pi.end(), 0);
      std::shuffle(sigma.begin(), sigma.end(), rng);
      std::shuffle(pi.begin(), pi.end(), rng);
      for (int b = 0; b < k; ++b) {
        img[static_cast<std::size_t>(2 * b)] = static_cast<std::uint8_t>(2 * sigma[static_cast<std::size_t>(b)]);
        img[static_cast<std::size_t>(2 * b + 1)] = static_cast<std::uint8_t>(2 * pi[static_cast<std::size_t>(b)] + 1);
      }
      CHECK(chi(Permutation::from_images(k, std::move(img))) == 1);
    }
  }
}

TEST_CASE("phi closed form") {
  for (int k : {1, 2, 3, 4}) {
    PhiValue pv = phi(Permutation(k));
    CHECK(pv.chi == 1);
    CHECK(pv.half_ell_q == k);
  }
}

TEST_CASE("phi oracle equalities") {
  SECTION("identity counts the whole free index set") {
    CHECK(phi_oracle(Permutation(2), 5, grand_cycle_perm(5)) == 25);
  }
  SECTION("(1 ~1) at k=3, N=7") {
    CHECK(phi_oracle(parse_cycles("(1 ~1)", 3), 7, grand_cycle_perm(7)) == 49);
  }
  SECTION("(1 ~2) at k=2, N=5 matches the formula") {
    Permutation w = parse_cycles("(1 ~2)", 2);
    PhiValue pv = phi(w);
    std::uint64_t expect = 0;
    if (pv.chi) {
      expect = 1;
      for (int i = 0; i < pv.half_ell_q; ++i) expect *= 5;
    }
    CHECK(phi_oracle(w, 5, grand_cycle_perm(5)) == expect);
  }
  SECTION("budget") {
    CHECK_THROWS_AS(phi_oracle(Permutation(6), 1000, grand_cycle_perm(1000)), Infeasible);
  }
}

TEST_CASE("structure theorem checks across S_2k, k <= 4") {
  for (int k = 1; k <= 4; ++k) {
    auto [T, Q, s] = fixed_perms(k);
    bool lengths_even = true, alternation = true, counts_match = true, phi_consistent = true;
    enumerate_s2k(k, [&](const Permutation& w) {
      GraphModel g = build_graph(w);
      CycleReport rep = cycle_report(g);
      // even lengths + alternation
      for (const auto& c : rep.undirected_cycles) {
        if (c.length % 2 != 0) lengths_even = false;
        if (!alternates(g, c.vertices, false)) alternation = false;
      }
      for (const auto& c : rep.directed_cycles) {
        if (c.length % 2 != 0) lengths_even = false;
        if (!alternates(g, c.vertices, true)) alternation = false;
      }
      // commutator count correspondence (parts 1-2)
      auto hist_from_comm = [&](const Permutation& gfix) {
        std::map<int, int> h;
        for (auto [len, cnt] : cycle_type(commutator(w, gfix)).multiplicities) {
          if (cnt % 2 != 0) counts_match = false;
          h[2 * len] = cnt / 2;
        }
        return h;
      };
      if (length_histogram(rep.undirected_cycles) != hist_from_comm(T)) counts_match = false;
      if (length_histogram(rep.directed_cycles) != hist_from_comm(Q)) counts_match = false;
      // phi agrees with the report
      PhiValue pv = phi(w);
      if (pv.chi != (rep.all_balanced() ? 1 : 0)) phi_consistent = false;
      if (pv.chi && pv.half_ell_q != static_cast<int>(rep.directed_cycles.size()))
        phi_consistent = false;
    });
    CHECK(lengths_even);
    CHECK(alternation);
    CHECK(counts_match);
    CHECK(phi_consistent);
  }
  // randomized spot checks at k = 5
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    Permutation w = random_perm(5, rng);
    CycleReport r = cycle_report(build_graph(w));
    PhiValue pv = phi(w);
    CHECK(pv.chi == (r.all_balanced() ? 1 : 0));
    if (pv.chi) CHECK(pv.half_ell_q == static_cast<int>(r.directed_cycles.size()));
  }
}

TEST_CASE("graph identity under right s-shift, k <= 4") {
  for (int k = 1; k <= 4; ++k) {
    Permutation s = fixed_s(k);
    bool identical = true;
    enumerate_s2k(k, [&](const Permutation& w) {
      auto base = edge_multiset(build_graph(w));
      Permutation shifted = w;
      for (int n = 1; n < k; ++n) {
        shifted = shifted * s;
        if (edge_multiset(build_graph(shifted)) != base) identical = false;
      }
    });
    CHECK(identical);
  }
  // converse direction: left shifts change the graph unless trivial
  Permutation w = parse_cycles("(1 ~1)", 3);
  Permutation s3 = fixed_s(3);
  CHECK(edge_multiset(build_graph(s3 * w)) != edge_multiset(build_graph(w)));
}

TEST_CASE("algebraic chi characterization agreement, k <= 4") {
  // the characterization is stated without proof; mismatches are findings
  // against the remark, never against chi()
  for (int k = 1; k <= 4; ++k) {
    std::uint64_t mismatches = 0;
    std::string first;
    enumerate_s2k(k, [&](const Permutation& w) {
      if (chi(w) != chi_algebraic(w)) {
        if (mismatches == 0) first = render_cycles(w);
        ++mismatches;
      }
    });
    if (mismatches != 0)
      WARN("chi_algebraic disagrees with chi() " << mismatches << " times at k=" << k
                                                 << ", first witness " << first);
    CHECK(true);  // informational sweep; chi() correctness is tested elsewhere
  }
}

TEST_CASE("dot export") {
  Permutation w = parse_cycles("(1 ~4)", 6);
  std::string a = export_dot(build_graph(w));
  std::string b = export_dot(build_graph(w));
  CHECK(a == b);
  GraphModel g = build_graph(Permutation(2));
  std::string dot = export_dot(g);
  std::size_t arrows = 0;
  for (std::size_t pos = dot.find("->"); pos != std::string::npos; pos = dot.find("->", pos + 1))
    ++arrows;
  CHECK(arrows == 8);  // 4k edges at k=2
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(dot.find("dir=none") != std::string::npos);
  CHECK(dot.find("\"~1\"") != std::string::npos);
}

TEST_CASE("twist permutation library") {
  CHECK(min_cycle_length(grand_cycle_perm(9)) == 9);
  CHECK(min_cycle_length(two_cycle_perm(11)) == 5);
  CHECK(min_cycle_length(involution_perm(6)) == 2);
  CHECK(min_cycle_length(identity_perm(4)) == 1);
  CHECK_THROWS_AS(involution_perm(5), OutOfRange);
  // two-cycle parts exceed 2k when N > 4k+2 (k=2 -> N=11 works)
  CHECK(min_cycle_length(two_cycle_perm(11)) > 4);
}
