#pragma once

// Upper-bound algorithms for approximate counting, with exact query
// accounting. Classical samplers draw real samples; the quantum procedures
// are simulated in the two-dimensional invariant subspace their dynamics
// live in, and phase estimation samples its closed-form outcome law.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace countbench::simulate {

using Rng = std::mt19937_64;

/// Which of the two sizes is the true |x|.
enum class Hypothesis { SizeK, SizeKPrime };

/// k' = round(k (1 + eps)); throws UsageError unless k >= 1, eps > 0 and k' > k.
int k_prime_of(int k, double eps);

struct OracleInstance {
  int n = 0;
  int size = 0;  // |x|; the hidden set is {0, ..., size-1} up to relabelling

  /// Throws UsageError unless 1 <= size <= n.
  static OracleInstance make(int n, int size);
  int sample(Rng& rng) const;
};

struct QueryTally {
  std::int64_t copies = 0;
  std::int64_t state_generation = 0;
  std::int64_t reflections = 0;
  std::int64_t membership = 0;

  QueryTally& operator+=(const QueryTally& o);
  /// Weighted total sum_i w_i T^(i), in the order copies, state generation,
  /// reflections, membership.
  double weighted(double w_copies, double w_gen, double w_refl, double w_memb) const;
};

struct TrialOutcome {
  Hypothesis decision = Hypothesis::SizeK;
  bool correct = false;
  bool failed = false;      // a budget or retry limit ran out before deciding
  bool in_regime = true;    // false for test-only parameters outside the stated preconditions
  QueryTally tally;
};

/// Oracle that implements the reflection about psi_x inside the quantum
/// procedures. A reflection costs one reflecting query, one membership
/// query (Grover with the membership oracle) or two state-generation calls.
enum class ReflectionOracle { Reflecting, Membership, StateGenerating };
void charge_reflections(QueryTally& tally, ReflectionOracle oracle, std::int64_t count);

// --- classical samplers ---------------------------------------------------

/// Decide size-k iff at most k distinct elements appear among the samples.
TrialOutcome coupon_test(int k, double eps, int sample_budget, Hypothesis truth, std::uint64_t seed);

/// Number of equal pairs among samples; size-k iff it exceeds the midpoint of
/// l(l-1)/(2k) and l(l-1)/(2k').
TrialOutcome collision_test(int k, double eps, int sample_count, Hypothesis truth, std::uint64_t seed);
/// Equal pairs among `samples`, by sorting.
std::int64_t count_collisions(std::vector<int> samples);

/// Each copy of psi_x measured against the uniform superposition succeeds
/// with probability |x|/n; size-k iff the success fraction is below the
/// midpoint of k/n and k'/n.
TrialOutcome overlap_test(int n, int k, double eps, int copy_count, Hypothesis truth, std::uint64_t seed);

// --- two-dimensional Grover simulator --------------------------------------

/// State a|marked> + b|unmarked> of the plane spanned by the marked and
/// unmarked components of the source state, where sin(theta) = a(0).
class GroverRotation {
 public:
  /// Throws UsageError unless 0 < marked_amplitude < 1.
  explicit GroverRotation(double marked_amplitude);

  double theta() const { return theta_; }
  double marked_amplitude() const { return marked_; }
  double unmarked_amplitude() const { return unmarked_; }
  double marked_probability() const { return marked_ * marked_; }
  const QueryTally& tally() const { return tally_; }

  /// Sign flip on the marked component; charged to `oracle`.
  void reflect_marked(ReflectionOracle oracle = ReflectionOracle::Membership);
  /// 2 s s^T - I about the source state; free unless an oracle is given.
  void reflect_source();
  /// One Grover iterate: reflect_marked then reflect_source.
  void iterate(ReflectionOracle oracle = ReflectionOracle::Membership);
  void reset();

 private:
  double theta_;
  double marked_;
  double unmarked_;
  double source_marked_;
  double source_unmarked_;
  QueryTally tally_;
};

GroverRotation grover_state(int n, double marked_amplitude);

/// Marked probability after 0..iterations Grover iterates with the full
/// length-n statevector, marked set {0..marked-1}, uniform source.
std::vector<double> full_statevector_marked_probabilities(int n, int marked, int iterations);

// --- amplitude estimation -------------------------------------------------

struct Estimate {
  double estimate = 0;
  int outcome = 0;
  int grid = 0;  // M
  QueryTally tally;
};

/// Probability of each phase-estimation outcome y in 0..M-1 for amplitude a:
/// (F(y - M theta/pi) + F(y + M theta/pi)) / 2 with the Fejer kernel
/// F(d) = sin^2(pi d) / (M^2 sin^2(pi d / M)) and theta = asin(sqrt(a)).
/// Accepts the closed range 0 <= a <= 1.
std::vector<double> phase_outcome_distribution(double a, int grid);

/// a_hat = sin^2(pi y / M) with M = 2^precision_bits. Needs 0 < a < 1 and
/// precision_bits in 1..20. Charges M - 1 reflections.
Estimate amplitude_estimate(double a_true, int precision_bits, std::uint64_t seed);
/// Same on an arbitrary grid M >= 2, charged to `oracle`.
Estimate amplitude_estimate_grid(double a_true, int grid, Rng& rng,
                                 ReflectionOracle oracle = ReflectionOracle::Reflecting);

/// Smallest M whose angular resolution pi/M fits twice into the gap between
/// asin(sqrt(a_lo)) and asin(sqrt(a_hi)).
int counting_grid(double a_lo, double a_hi);

// --- quantum procedures ----------------------------------------------------

/// Amplitude estimation on a = |x|/n; nearest-angle decision.
TrialOutcome quantum_counting(int n, int k, double eps, Hypothesis truth, std::uint64_t seed,
                              ReflectionOracle oracle = ReflectionOracle::Reflecting);

/// Amplitude estimation on a = l/|x| with l elements of x given. Needs
/// 1 <= l <= k; l > k/2 is allowed but flagged out of regime.
TrialOutcome known_subset_counting(int n, int k, double eps, int ell, Hypothesis truth, std::uint64_t seed,
                                   ReflectionOracle oracle = ReflectionOracle::Reflecting);
/// Shared core: runs on the given generator and adds to `out`.
void known_subset_counting_into(int k, double eps, int ell, Hypothesis truth, Rng& rng, ReflectionOracle oracle,
                                TrialOutcome& out);

/// l = ceil(k^(1/3) / (2 eps^(2/3))), the sample count before estimation.
int sample_then_count_ell(int k, double eps);
/// Draw state-generation samples until l distinct (budget 10 l), then
/// known_subset_counting with reflections implemented by two state-generation
/// calls each.
TrialOutcome sample_then_count(int n, int k, double eps, Hypothesis truth, std::uint64_t seed);

inline constexpr int kDefaultStageRetries = 3;

/// Starting from one free element, grow S to l = ceil(1/eps) elements by
/// amplitude amplification between psi_S and psi_x, then known_subset_counting.
TrialOutcome bootstrap_reflection_counting(int n, int k, double eps, Hypothesis truth, std::uint64_t seed,
                                           int stage_retries = kDefaultStageRetries);
/// Iterations used by a growth stage with |S| = s: ceil((pi/4) sqrt(k/s)).
int bootstrap_iterations(int k, int s);

// --- campaigns -------------------------------------------------------------

enum class Procedure { Coupon, Collision, Overlap, QCount, Subset, SampleCount, Bootstrap };
std::string_view procedure_name(Procedure p);
Procedure procedure_from_name(std::string_view name);

struct SimulationParams {
  int n = 1024;
  int k = 16;
  double eps = 1;
  int ell = 0;        // known_subset_counting: given elements; samplers: 0 picks the default budget
  int budget = 0;     // samples or copies for the classical procedures; 0 picks the default
  int repeat = 1;     // majority of r
  int stage_retries = kDefaultStageRetries;
  ReflectionOracle oracle = ReflectionOracle::Reflecting;
};

/// Default sample/copy budget for the classical procedures: 5k for coupon,
/// ceil(8 sqrt(k)/eps) for collision, ceil(64 n/(k eps^2)) for overlap.
int default_budget(Procedure p, const SimulationParams& params);

/// One trial: `repeat` independent runs, majority decision, summed tallies.
TrialOutcome run_trial(Procedure p, const SimulationParams& params, Hypothesis truth, std::uint64_t seed);

/// Seed of trial i: the first output of mt19937_64 seeded from
/// seed_seq{lo(master), hi(master), lo(i), hi(i)}.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

struct CampaignTrial {
  std::int64_t index = 0;
  Hypothesis truth = Hypothesis::SizeK;
  TrialOutcome outcome;
};

struct CampaignSummary {
  std::int64_t trials = 0;
  double success_rate = 0;
  double standard_error = 0;       // sqrt(p (1 - p) / trials)
  double success_rate_k = 0;       // restricted to truth = size-k
  double success_rate_k_prime = 0;
  std::int64_t failures = 0;
  double mean_copies = 0;
  double mean_state_generation = 0;
  double mean_reflections = 0;
  double mean_membership = 0;
};

/// Trials alternate truth (even index size-k, odd size-k'), each with its
/// own derived seed, spread over `jobs` threads. Results come back in index order.
std::vector<CampaignTrial> run_campaign(Procedure p, const SimulationParams& params, std::int64_t trials,
                                        std::uint64_t master_seed, int jobs = 1);
CampaignSummary summarize(const std::vector<CampaignTrial>& trials);

}  // namespace countbench::simulate
