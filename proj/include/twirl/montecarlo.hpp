#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/graph_model.hpp"
#include "twirl/moments.hpp"
#include "twirl/weingarten.hpp"

namespace twirl {

using ComplexMatrix = Eigen::MatrixXcd;

enum class TwistKind { grand_cycle, two_cycle, involution, identity };

inline std::string twist_name(TwistKind t) {
  switch (t) {
    case TwistKind::grand_cycle: return "grand";
    case TwistKind::two_cycle: return "two-cycle";
    case TwistKind::involution: return "involution";
    case TwistKind::identity: return "identity";
  }
  return "?";
}

inline std::vector<int> twist_permutation(TwistKind t, int N) {
  switch (t) {
    case TwistKind::grand_cycle: return grand_cycle_perm(N);
    case TwistKind::two_cycle: return two_cycle_perm(N);
    case TwistKind::involution: return involution_perm(N);
    case TwistKind::identity: return identity_perm(N);
  }
  throw Error("unknown twist");
}

struct SampleConfig {
  int k = 2;
  int N = 16;
  std::uint64_t samples = 20000;
  std::uint64_t seed = 1;
  TwistKind twist = TwistKind::grand_cycle;
  Ensemble ensemble = Ensemble::COE;
  int workers = 0;  // informational; partitioning is fixed, independent of threads
};

struct EstimateReport {
  double mean = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::optional<double> reference;
  std::optional<double> z_score;
  std::uint64_t seed_used = 0;
  bool retried = false;
  std::vector<std::string> warnings;

  bool within_4se() const { return !z_score || std::abs(*z_score) < 4.0; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Gaussian pairs by Box-Muller over mt19937_64: both pieces are pinned by
/// the standard, so streams are reproducible across standard libraries
/// (std::normal_distribution is not).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    // u1 in (0,1], u2 in [0,1)
    double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    double u2 = static_cast<double>(gen_() >> 11) * 0x1p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi_v<double> * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

  std::complex<double> next_complex() {
    double re = next(), im = next();
    return {re, im};
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0;
  bool have_ = false;
};

}  // namespace detail

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phase correction; redraws on the measure-zero degenerate case.
inline ComplexMatrix sample_haar_unitary(int N, detail::GaussianStream& g) {
  if (N < 1) throw OutOfRange("N must be >= 1");
  while (true) {
    ComplexMatrix A(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) A(i, j) = g.next_complex();
    Eigen::HouseholderQR<ComplexMatrix> qr(A);
    ComplexMatrix Q = qr.householderQ();
    ComplexMatrix R = qr.matrixQR();
    bool degenerate = false;
    for (int j = 0; j < N && !degenerate; ++j) degenerate = std::abs(R(j, j)) == 0.0;
    if (degenerate) continue;
    for (int j = 0; j < N; ++j) Q.col(j) *= R(j, j) / std::abs(R(j, j));
    return Q;
  }
}

/// COE draw: U = V V^T with V Haar; unitary symmetric.
inline ComplexMatrix sample_coe(int N, detail::GaussianStream& g) {
  ComplexMatrix V = sample_haar_unitary(N, g);
  return V * V.transpose();
}

/// |Tr((P U)^k)|^2 with the twist applied as a row shuffle.
inline double twisted_trace_sq(const ComplexMatrix& U, const std::vector<int>& P, int k) {
  const int N = static_cast<int>(U.rows());
  ComplexMatrix B(N, N);
  for (int i = 0; i < N; ++i) B.row(i) = U.row(P[static_cast<std::size_t>(i)]);
  ComplexMatrix M = B;
  for (int j = 1; j < k; ++j) M = M * B;
  std::complex<double> tr = M.trace();
  return std::norm(tr);
}

/// <|Tr U^k|^2> over COE(N), k < N: the classical closed form.
inline double coe_untwisted_reference(int k, int N) {
  BigRat acc = 2 * BigRat(k);
  for (int m = 1; m <= k; ++m) acc -= BigRat(k) * BigRat(2, 2 * m + N - 1);
  return static_cast<double>(acc);
}

namespace detail {

struct Accumulator {
  double sum = 0, sum_sq = 0;
  std::uint64_t n = 0;
};

/// One batch of i.i.d. draws with its own derived generator; batches are a
/// fixed partition of the sample budget, so results do not depend on how
/// many threads execute them.  The first draw of every batch is checked
/// against the unitarity/symmetry tolerances.
inline Accumulator run_batch(const SampleConfig& cfg, const std::vector<int>& P,
                             std::uint64_t batch_index, std::uint64_t batch_samples) {
  GaussianStream g(splitmix64(cfg.seed ^ splitmix64(batch_index + 1)));
  Accumulator acc;
  for (std::uint64_t s = 0; s < batch_samples; ++s) {
    ComplexMatrix U = cfg.ensemble == Ensemble::COE ? sample_coe(cfg.N, g)
                                                    : sample_haar_unitary(cfg.N, g);
    if (s == 0 && cfg.N <= 64) {
      double uerr = (U.adjoint() * U - ComplexMatrix::Identity(cfg.N, cfg.N)).cwiseAbs().maxCoeff();
      double serr = cfg.ensemble == Ensemble::COE ? (U - U.transpose()).cwiseAbs().maxCoeff() : 0.0;
      if (uerr >= 1e-10 || serr >= 1e-10)
        throw Error("sampler tolerance violated in batch " + std::to_string(batch_index));
    }
    double v = twisted_trace_sq(U, P, cfg.k);
    acc.sum += v;
    acc.sum_sq += v * v;
    ++acc.n;
  }
  return acc;
}

}  // namespace detail

inline constexpr std::uint64_t kMcBatches = 32;

/// Empirical twisted moment: mean of |Tr((PU)^k)|^2 with standard error.
/// Deterministic given (seed, config); independent of thread count.
inline EstimateReport empirical_moment(const SampleConfig& cfg,
                                       std::optional<double> reference = std::nullopt) {
  if (cfg.k < 1 || cfg.N < 1 || cfg.samples < 2) throw OutOfRange("bad sample config");
  std::vector<int> P = twist_permutation(cfg.twist, cfg.N);

  EstimateReport rep;
  rep.seed_used = cfg.seed;
  if (min_cycle_length(P) <= 2 * cfg.k &&
      (cfg.twist == TwistKind::grand_cycle || cfg.twist == TwistKind::two_cycle))
    rep.warnings.push_back("twist has a cycle of length <= 2k; the long-cycle hypothesis fails");

  const std::uint64_t nb = std::min<std::uint64_t>(kMcBatches, cfg.samples);
  std::vector<detail::Accumulator> accs(nb);
  int nthreads = detail::resolve_threads(cfg.workers);
  auto worker = [&](int w) {
    for (std::uint64_t b = static_cast<std::uint64_t>(w); b < nb; b += static_cast<std::uint64_t>(nthreads)) {
      std::uint64_t lo = cfg.samples * b / nb, hi = cfg.samples * (b + 1) / nb;
      accs[b] = detail::run_batch(cfg, P, b, hi - lo);
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  double sum = 0, sum_sq = 0;
  std::uint64_t n = 0;
  for (const auto& a : accs) {  // merged in batch order
    sum += a.sum;
    sum_sq += a.sum_sq;
    n += a.n;
  }
  rep.samples = n;
  rep.mean = sum / static_cast<double>(n);
  double var = (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
  rep.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  rep.reference = reference;
  if (rep.reference) rep.z_score = (rep.mean - *rep.reference) / rep.std_error;
  return rep;
}

/// Exact reference for a config, when one is available: the enumerated moment
/// for admissible long-cycle twists, the classical closed form for the
/// untwisted/involution cases (Lemma on involutions), k for CUE.
inline std::optional<double> exact_reference(const SampleConfig& cfg,
                                             const MomentOptions& mopts = {}) {
  if (cfg.ensemble == Ensemble::CUE) {
    if (cfg.k < cfg.N) return static_cast<double>(cfg.k);
    return std::nullopt;
  }
  switch (cfg.twist) {
    case TwistKind::identity:
    case TwistKind::involution:
      if (cfg.k < cfg.N) return coe_untwisted_reference(cfg.k, cfg.N);
      return std::nullopt;
    case TwistKind::grand_cycle:
    case TwistKind::two_cycle: {
      std::vector<int> P = twist_permutation(cfg.twist, cfg.N);
      if (min_cycle_length(P) <= 2 * cfg.k) return std::nullopt;  // reference withheld
      try {
        MomentReport rep = coe_moment(cfg.k, mopts);
        return static_cast<double>(evaluate_moment(rep, cfg.N));
      } catch (const BudgetExceeded&) {
        return std::nullopt;  // sampling still fine; the exact side is out of budget
      }
    }
  }
  return std::nullopt;
}

/// The 4-SE agreement protocol with a single documented re-seed.
inline EstimateReport estimate_with_retry(SampleConfig cfg, std::optional<double> reference) {
  EstimateReport rep = empirical_moment(cfg, reference);
  if (!rep.within_4se()) {
    cfg.seed = detail::splitmix64(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    EstimateReport second = empirical_moment(cfg, reference);
    second.retried = true;
    second.warnings.insert(second.warnings.end(), rep.warnings.begin(), rep.warnings.end());
    second.warnings.push_back("first attempt |z| >= 4 (z = " + std::to_string(*rep.z_score) +
                              "); retried with derived seed " + std::to_string(cfg.seed));
    return second;
  }
  return rep;
}

struct InvolutionCheck {
  EstimateReport twisted;    // twist = pairing involution
  EstimateReport untwisted;  // twist = identity
  double diff = 0;
  double diff_se = 0;
  double diff_z = 0;
  std::optional<double> reference;  // classical COE value, when k < N

  bool passes() const {
    return std::abs(diff_z) < 4.0 && twisted.within_4se() && untwisted.within_4se();
  }
};

/// Statistical check of the involution invariance: the pairing-involution
/// twist must reproduce the untwisted COE moment.
inline InvolutionCheck involution_check(int k, int N, std::uint64_t samples, std::uint64_t seed) {
  if (N % 2 != 0) throw OutOfRange("involution check needs even N");
  std::optional<double> ref;
  if (k < N) ref = coe_untwisted_reference(k, N);

  SampleConfig cfg;
  cfg.k = k;
  cfg.N = N;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.ensemble = Ensemble::COE;

  InvolutionCheck out;
  cfg.twist = TwistKind::involution;
  out.twisted = estimate_with_retry(cfg, ref);
  cfg.twist = TwistKind::identity;
  cfg.seed = detail::splitmix64(seed ^ 0x517CC1B727220A95ULL);  // independent stream
  out.untwisted = estimate_with_retry(cfg, ref);
  out.reference = ref;
  out.diff = out.twisted.mean - out.untwisted.mean;
  out.diff_se = std::sqrt(out.twisted.std_error * out.twisted.std_error +
                          out.untwisted.std_error * out.untwisted.std_error);
  out.diff_z = out.diff / out.diff_se;
  return out;
}

}  // namespace twirl
