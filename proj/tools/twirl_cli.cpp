// twirl -- exact and Monte Carlo moments of permutation-twisted circular
// ensembles.  Subcommands: moment, wg, classify, phi, mc.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "twirl/classify.hpp"
#include "twirl/graph_model.hpp"
#include "twirl/moments.hpp"
#include "twirl/montecarlo.hpp"
#include "twirl/weingarten.hpp"

namespace {

constexpr const char* kVersion = "twirl 0.1.0";

using namespace twirl;

// exit codes: 0 success/verified, 1 contract violation, 2 usage error
constexpr int kOk = 0, kViolation = 1, kUsage = 2;

struct Manifest {
  std::string subcommand;
  nlohmann::json flags = nlohmann::json::object();
  int cache_hits = 0;
  bool small_n_caveat = false;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void emit() const {
    nlohmann::json j{{"version", kVersion},
                     {"subcommand", subcommand},
                     {"flags", flags},
                     {"cache_hits", cache_hits},
                     {"small_n_caveat", small_n_caveat},
                     {"wall_seconds",
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    std::cerr << "manifest: " << j.dump() << "\n";
  }
};

/// Integer roots of p (with multiplicity) split off by synthetic division;
/// candidates are divisors of the trailing/leading coefficients, so the
/// factorization is complete whenever the polynomial splits over Z with
/// unit leading part.
struct SplitDenominator {
  BigInt content = 1;
  std::vector<std::pair<BigInt, int>> roots;  // (root, multiplicity), descending
  Polynomial remainder;
};

SplitDenominator split_small_roots(const Polynomial& p) {
  SplitDenominator out;
  if (p.is_zero()) return out;
  Polynomial q = p;
  out.content = q.content();
  if (q.leading() < 0) out.content = -out.content;
  q = q.divide_by_int(out.content);
  std::vector<BigInt> candidates;
  for (BigInt r = -64; r <= 64; ++r) candidates.push_back(r);
  for (const auto& r : candidates) {
    if (q.degree() < 1) break;
    while (q.degree() >= 1 && q.evaluate(r) == 0) {
      q = divide_exact(q, Polynomial::linear_root(r));
      bool found = false;
      for (auto& [root, mult] : out.roots)
        if (root == r) {
          ++mult;
          found = true;
        }
      if (!found) out.roots.push_back({r, 1});
    }
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  out.remainder = q;
  return out;
}

std::string factored_string(const RationalFunction& f) {
  if (f.is_zero()) return "0";
  std::string out;
  BigInt ncontent = f.num().content();
  if (f.num().leading() < 0) ncontent = -ncontent;
  Polynomial core = f.num().divide_by_int(ncontent);
  if (core.is_one())
    out += ncontent.str();
  else if (ncontent == -1)
    out += "-";
  else if (ncontent != 1)
    out += ncontent.str();
  if (!core.is_one()) out += core.degree() > 0 ? "(" + core.to_string() + ")" : core.to_string();
  if (f.den().is_one()) return out;
  out += "/";
  SplitDenominator d = split_small_roots(f.den());
  std::string den;
  if (d.content != 1) den += d.content.str();
  for (const auto& [root, mult] : d.roots) {
    if (root == 0)
      den += "N";
    else
      den += "(N" + std::string(root > 0 ? "-" : "+") + BigInt(boost::multiprecision::abs(root)).str() + ")";
    if (mult > 1) den += "^" + std::to_string(mult);
  }
  if (!d.remainder.is_one()) den += "(" + d.remainder.to_string() + ")";
  return out + den;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(1) << "\n";
}

int cmd_moment(int k, int max_order, const std::vector<int>& evals, const std::string& json_path,
               const std::string& csv_path, int threads, bool coset, bool allow_k6,
               const std::string& cache_dir) {
  Manifest man;
  man.subcommand = "moment";
  man.flags = {{"k", k},         {"max_order", max_order}, {"eval", evals},
               {"threads", threads}, {"coset", coset},     {"allow_k6", allow_k6},
               {"cache_dir", cache_dir}};

  MomentOptions opts;
  opts.threads = threads;
  opts.coset_speedup = coset;
  opts.allow_k6 = allow_k6;
  opts.tail_order = std::max(max_order, 4);
  opts.cache_dir = cache_dir;
  if (k >= 6)
    opts.progress = [](std::uint64_t done, std::uint64_t total) {
      std::cerr << "\rprogress: " << done << "/" << total << std::flush;
      if (done == total) std::cerr << "\n";
    };
  MomentReport rep = coe_moment(k, opts);
  man.cache_hits = rep.meta.cache_hit ? 1 : 0;

  std::cout << "M_" << k << "(N) = " << factored_string(rep.moment) << "\n";
  std::cout << "       = " << rep.moment.to_string() << "\n";
  SeriesTail s = series_in_inverse_n(rep.moment, max_order);
  std::cout << "series: " << s.to_string() << "\n";
  int rc = kOk;
  for (int N : evals) {
    if (N <= k) man.small_n_caveat = true;
    try {
      std::cout << "M_" << k << "(" << N << ") = " << evaluate_moment(rep, N).str()
                << (N <= k ? "   [N <= k: outside the Weingarten validity regime]" : "") << "\n";
    } catch (const PoleAtN& e) {
      std::cout << "M_" << k << "(" << N << "): " << e.what() << "\n";
      rc = kViolation;
    }
  }
  TailCoefficients tc = tail_check(rep);
  if (!(tc.c1 == 0 && tc.c2 == 0)) {
    std::cout << "tail contract violated: c1 = " << tc.c1.str() << ", c2 = " << tc.c2.str() << "\n";
    rc = kViolation;
  }
  if (!json_path.empty()) write_json_file(json_path, to_json(rep));
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    out << counts_csv(rep);
  }
  man.emit();
  return rc;
}

int cmd_wg(const std::string& ensemble, int k, const std::string& type_csv, int expand,
           const std::string& cache_dir) {
  Manifest man;
  man.subcommand = "wg";
  man.flags = {{"ensemble", ensemble}, {"k", k}, {"type", type_csv}, {"expand", expand}};
  Ensemble e = ensemble == "cue" ? Ensemble::CUE : Ensemble::COE;
  Partition p = partition_from_csv(type_csv, k);
  CacheResult cr = cache_dir.empty() ? CacheResult{e == Ensemble::CUE ? cue_table(k) : coe_table(k), false}
                                     : load_or_build_table(e, k, cache_dir);
  man.cache_hits = cr.cache_hit ? 1 : 0;
  const RationalFunction& f = cr.table.at(p);
  std::cout << "Wg^" << ensemble_name(e) << "_{N," << k << "}(" << partition_to_dash(p)
            << ") = " << factored_string(f) << "\n";
  if (expand > 0)
    std::cout << "series: " << series_in_inverse_n(f, expand).to_string() << "\n";
  man.emit();
  return kOk;
}

int cmd_classify(int k, const std::string& alpha_csv, const std::string& beta_csv, bool list,
                 bool count, bool verify, int sample_cap, int threads,
                 const std::string& json_path) {
  Manifest man;
  man.subcommand = "classify";
  man.flags = {{"k", k},       {"alpha", alpha_csv},       {"beta", beta_csv}, {"list", list},
               {"count", count}, {"verify", verify},       {"sample_cap", sample_cap},
               {"threads", threads}};

  CensusOptions opts;
  opts.threads = threads;
  opts.max_k = 6;
  ClassCensus cen = census(k, sample_cap, opts);
  int rc = kOk;

  if (!alpha_csv.empty() || !beta_csv.empty()) {
    if (alpha_csv.empty() || beta_csv.empty()) throw ParseError("--alpha and --beta go together", 0);
    Partition alpha = partition_from_csv(alpha_csv, k);
    Partition beta = partition_from_csv(beta_csv, k);
    for (bool reg : {false, true}) {
      ClassKey key{reg, alpha, beta};
      std::cout << key.to_string() << " " << cen.count_of(key).str() << "\n";
      if (list) {
        auto it = cen.table.find(key);
        if (it != cen.table.end())
          for (const auto& w : it->second.samples) std::cout << "  " << render_cycles(w) << "\n";
      }
    }
  } else if (!verify) {
    std::cout << "k=" << k << " total=" << cen.total << " chi_zero=" << cen.chi_zero
              << " classes=" << cen.table.size() << "\n";
    for (const auto& [key, entry] : cen.table) {
      std::cout << key.to_string() << " " << entry.count.str() << "\n";
      if (list)
        for (const auto& w : entry.samples) std::cout << "  " << render_cycles(w) << "\n";
    }
  }

  if (verify) {
    LemmaReport rep = verify_lemmas(cen);
    for (const auto& c : rep.clauses)
      std::cout << "[" << (c.pass ? "pass" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
    BigInt ident = regular_identity_check(cen);
    bool ident_ok = ident == 0;
    std::cout << "[" << (ident_ok ? "pass" : "FAIL") << "] regular-count-identity: lhs = "
              << ident.str() << "\n";
    if (rep.all_pass() && ident_ok) {
      std::cout << "all clauses pass\n";
    } else {
      rc = kViolation;
    }
  }
  if (!json_path.empty()) write_json_file(json_path, to_json(cen));
  man.emit();
  return rc;
}

int cmd_phi(int k, const std::string& omega_text, bool oracle, int N, const std::string& perm_kind,
            bool dot) {
  Manifest man;
  man.subcommand = "phi";
  man.flags = {{"k", k}, {"omega", omega_text}, {"oracle", oracle}, {"n", N}, {"perm", perm_kind},
               {"dot", dot}};
  if (oracle && N < 1) throw ParseError("--oracle requires --n", 0);
  Permutation w = parse_cycles(omega_text, k);
  PhiValue pv = phi(w);
  std::cout << "chi=" << pv.chi;
  if (pv.chi)
    std::cout << " m=" << pv.half_ell_q << " phi=N^" << pv.half_ell_q;
  else
    std::cout << " phi=0";
  int rc = kOk;
  if (oracle) {
    std::vector<int> P = perm_kind == "two-cycle" ? two_cycle_perm(N) : grand_cycle_perm(N);
    if (min_cycle_length(P) <= 2 * k)
      std::cout << " [warning: twist cycle <= 2k, theorem hypothesis violated]";
    std::uint64_t got = phi_oracle(w, N, P);
    std::uint64_t expect = 0;
    if (pv.chi) {
      expect = 1;
      for (int i = 0; i < pv.half_ell_q; ++i) expect *= static_cast<std::uint64_t>(N);
    }
    bool ok = got == expect;
    std::cout << " oracle=" << got << (ok ? " OK" : " MISMATCH");
    if (!ok) rc = kViolation;
  }
  std::cout << "\n";
  if (dot) std::cout << export_dot(build_graph(w));
  man.emit();
  return rc;
}

int cmd_mc(int k, int N, std::uint64_t samples, std::uint64_t seed, const std::string& twist,
           const std::string& ensemble, int workers, const std::string& csv_path,
           const std::string& cache_dir) {
  Manifest man;
  man.subcommand = "mc";
  man.flags = {{"k", k},       {"n", N},           {"samples", samples}, {"seed", seed},
               {"twist", twist}, {"ensemble", ensemble}, {"workers", workers}};

  SampleConfig cfg;
  cfg.k = k;
  cfg.N = N;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.ensemble = ensemble == "cue" ? Ensemble::CUE : Ensemble::COE;
  if (twist == "grand")
    cfg.twist = TwistKind::grand_cycle;
  else if (twist == "two-cycle")
    cfg.twist = TwistKind::two_cycle;
  else if (twist == "involution")
    cfg.twist = TwistKind::involution;
  else if (twist == "identity")
    cfg.twist = TwistKind::identity;
  else
    throw ParseError("unknown twist '" + twist + "'", 0);

  MomentOptions mopts;
  mopts.cache_dir = cache_dir;
  std::optional<double> ref = exact_reference(cfg, mopts);
  EstimateReport rep = estimate_with_retry(cfg, ref);
  for (const auto& wmsg : rep.warnings) std::cerr << "warning: " << wmsg << "\n";
  if (!ref) std::cerr << "warning: no exact reference available for this config\n";

  std::string csv = "ensemble,twist,k,N,samples,seed,mean,std_error,reference,z,retried\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%llu,%llu,%.17g,%.17g,%s,%s,%d\n",
                ensemble.c_str(), twist.c_str(), k, N,
                static_cast<unsigned long long>(samples),
                static_cast<unsigned long long>(rep.seed_used), rep.mean, rep.std_error,
                ref ? std::to_string(*ref).c_str() : "",
                rep.z_score ? std::to_string(*rep.z_score).c_str() : "", rep.retried ? 1 : 0);
  csv += buf;
  std::cout << csv;
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    out << csv;
  }
  man.emit();
  return rep.within_4se() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) + " -- twisted circular-ensemble moment calculator"};
  app.require_subcommand(1);
  std::string cache_dir = twirl::default_cache_dir();
  app.add_option("--cache", cache_dir, "Weingarten table cache directory (TWIRL_CACHE_DIR)");

  // moment
  auto* mom = app.add_subcommand("moment", "exact moment M_k(N) by exhaustive enumeration");
  int m_k = 2, m_order = 4, m_threads = 0;
  bool m_coset = false, m_allow6 = false;
  std::vector<int> m_eval;
  std::string m_json, m_csv;
  mom->add_option("--k", m_k, "moment order")->required();
  mom->add_option("--max-order", m_order, "series order to print")->default_val(4);
  mom->add_option("--eval", m_eval, "evaluate at integer N (repeatable)");
  mom->add_option("--json", m_json, "write the full report as JSON");
  mom->add_option("--csv", m_csv, "write the aggregated count table as CSV");
  mom->add_option("--threads", m_threads, "worker cap (0 = auto)");
  mom->add_flag("--coset", m_coset, "use the coset-representative speedup");
  mom->add_flag("--allow-k6", m_allow6, "opt in to the minutes-scale k=6 run");

  // wg
  auto* wg = app.add_subcommand("wg", "exact Weingarten function of a partition");
  std::string w_ens = "coe", w_type;
  int w_k = 1, w_expand = 0;
  wg->add_option("--ensemble", w_ens, "cue|coe")->check(CLI::IsMember({"cue", "coe"}))->required();
  wg->add_option("--k", w_k, "order")->required();
  wg->add_option("--type", w_type, "partition of k, comma separated, 1s explicit")->required();
  wg->add_option("--expand", w_expand, "also print this many series terms");

  // classify
  auto* cl = app.add_subcommand("classify", "census of contributing permutations");
  int c_k = 2, c_cap = 8, c_threads = 0;
  bool c_list = false, c_count = false, c_verify = false;
  std::string c_alpha, c_beta, c_json;
  cl->add_option("--k", c_k, "symbol count")->required();
  cl->add_option("--alpha", c_alpha, "filter: half-type of [w,T], comma separated");
  cl->add_option("--beta", c_beta, "filter: half-type of [w,Q], comma separated");
  cl->add_flag("--list", c_list, "print stored witnesses");
  cl->add_flag("--count", c_count, "print counts only");
  cl->add_flag("--verify", c_verify, "check every classification clause and the count identity");
  cl->add_option("--sample-cap", c_cap, "witnesses stored per class")->default_val(8);
  cl->add_option("--threads", c_threads, "worker cap (0 = auto)");
  cl->add_option("--json", c_json, "write the census as JSON");

  // phi
  auto* ph = app.add_subcommand("phi", "index-count factor of one permutation");
  int p_k = 2, p_n = 0;
  std::string p_omega, p_perm = "grand";
  bool p_oracle = false, p_dot = false;
  ph->add_option("--k", p_k, "symbol count")->required();
  ph->add_option("--omega", p_omega, "permutation in cycle notation, bar spelled ~")->required();
  ph->add_flag("--oracle", p_oracle, "cross-check by brute-force index enumeration");
  ph->add_option("--n", p_n, "matrix dimension for the oracle");
  ph->add_option("--perm", p_perm, "grand|two-cycle")->check(CLI::IsMember({"grand", "two-cycle"}));
  ph->add_flag("--dot", p_dot, "print the graph model in DOT format");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of a twisted moment");
  int mc_k = 2, mc_n = 16, mc_workers = 0;
  std::uint64_t mc_samples = 20000, mc_seed = 1;
  std::string mc_twist = "grand", mc_ens = "coe", mc_csv;
  mc->add_option("--k", mc_k)->required();
  mc->add_option("--n", mc_n)->required();
  mc->add_option("--samples", mc_samples)->default_val(20000);
  mc->add_option("--seed", mc_seed)->default_val(1);
  mc->add_option("--twist", mc_twist, "grand|two-cycle|involution|identity")
      ->check(CLI::IsMember({"grand", "two-cycle", "involution", "identity"}));
  mc->add_option("--ensemble", mc_ens, "cue|coe")->check(CLI::IsMember({"cue", "coe"}));
  mc->add_option("--threads", mc_workers, "worker cap (0 = auto)");
  mc->add_option("--csv", mc_csv, "also write the CSV to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*mom)
      return cmd_moment(m_k, m_order, m_eval, m_json, m_csv, m_threads, m_coset, m_allow6,
                        cache_dir);
    if (*wg) return cmd_wg(w_ens, w_k, w_type, w_expand, cache_dir);
    if (*cl)
      return cmd_classify(c_k, c_alpha, c_beta, c_list, c_count, c_verify, c_cap, c_threads, c_json);
    if (*ph) return cmd_phi(p_k, p_omega, p_oracle, p_n, p_perm, p_dot);
    if (*mc)
      return cmd_mc(mc_k, mc_n, mc_samples, mc_seed, mc_twist, mc_ens, mc_workers, mc_csv, cache_dir);
  } catch (const twirl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const twirl::OutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const twirl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolation;
  }
  return kUsage;
}
