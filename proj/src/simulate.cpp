#include "countbench/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "countbench/errors.hpp"

namespace countbench::simulate {

namespace {

constexpr double kPi = std::numbers::pi;

struct Sizes {
  int k;
  int k_prime;
  int truth_size;
};

Sizes sizes_of(int k, double eps, Hypothesis truth) {
  const int kp = k_prime_of(k, eps);
  return {k, kp, truth == Hypothesis::SizeK ? k : kp};
}

TrialOutcome decided(Hypothesis decision, Hypothesis truth, const QueryTally& tally) {
  TrialOutcome out;
  out.decision = decision;
  out.correct = decision == truth;
  out.tally = tally;
  return out;
}

bool theorem_regime(int n, int k, double eps) {
  return n >= 5 * k && eps >= 1.0 / k && eps <= 1.0;
}

// ceil that ignores rounding noise just above an integer.
int ceil_int(double v) { return static_cast<int>(std::ceil(v - 1e-9)); }

double fejer(double d, int grid) {
  const double den = std::sin(kPi * d / grid);
  if (std::abs(den) < 1e-12) return 1.0;
  const double num = std::sin(kPi * d);
  return num * num / (static_cast<double>(grid) * grid * den * den);
}

// Reflection of a planar vector about the unit axis u: 2 (u.s) u - s.
void reflect_about(double& s0, double& s1, double u0, double u1) {
  const double dot = s0 * u0 + s1 * u1;
  s0 = 2 * dot * u0 - s0;
  s1 = 2 * dot * u1 - s1;
}

}  // namespace

int k_prime_of(int k, double eps) {
  if (k < 1) throw UsageError("k must be >= 1");
  if (!(eps > 0) || !std::isfinite(eps)) throw UsageError("eps must be positive");
  const double kp = std::round(k * (1 + eps));
  if (kp > 1e9) throw UsageError("k(1+eps) too large");
  const int out = static_cast<int>(kp);
  if (out <= k) throw UsageError("eps too small: round(k(1+eps)) must exceed k");
  return out;
}

OracleInstance OracleInstance::make(int n, int size) {
  if (size < 1 || size > n) throw UsageError("OracleInstance: need 1 <= |x| <= n");
  return {n, size};
}

int OracleInstance::sample(Rng& rng) const {
  return std::uniform_int_distribution<int>(0, size - 1)(rng);
}

QueryTally& QueryTally::operator+=(const QueryTally& o) {
  copies += o.copies;
  state_generation += o.state_generation;
  reflections += o.reflections;
  membership += o.membership;
  return *this;
}

double QueryTally::weighted(double w_copies, double w_gen, double w_refl, double w_memb) const {
  return w_copies * copies + w_gen * state_generation + w_refl * reflections + w_memb * membership;
}

void charge_reflections(QueryTally& tally, ReflectionOracle oracle, std::int64_t count) {
  switch (oracle) {
    case ReflectionOracle::Reflecting: tally.reflections += count; break;
    case ReflectionOracle::Membership: tally.membership += count; break;
    // One direct and one reverse call make a reflection.
    case ReflectionOracle::StateGenerating: tally.state_generation += 2 * count; break;
  }
}

// Classical samples are measurements of copies of psi_x, so they are tallied as copies.
TrialOutcome coupon_test(int k, double eps, int sample_budget, Hypothesis truth, std::uint64_t seed) {
  if (sample_budget < 0) throw UsageError("coupon_test: negative budget");
  const Sizes s = sizes_of(k, eps, truth);
  const OracleInstance x = OracleInstance::make(s.truth_size, s.truth_size);
  Rng rng(seed);
  std::vector<char> seen(static_cast<std::size_t>(x.size), 0);
  int distinct = 0;
  QueryTally tally;
  for (int i = 0; i < sample_budget; ++i) {
    const int e = x.sample(rng);
    ++tally.copies;
    if (!seen[static_cast<std::size_t>(e)]) {
      seen[static_cast<std::size_t>(e)] = 1;
      ++distinct;
    }
  }
  return decided(distinct <= k ? Hypothesis::SizeK : Hypothesis::SizeKPrime, truth, tally);
}

std::int64_t count_collisions(std::vector<int> samples) {
  std::sort(samples.begin(), samples.end());
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const auto run = static_cast<std::int64_t>(j - i);
    pairs += run * (run - 1) / 2;
    i = j;
  }
  return pairs;
}

TrialOutcome collision_test(int k, double eps, int sample_count, Hypothesis truth, std::uint64_t seed) {
  if (sample_count < 2) throw UsageError("collision_test: need at least 2 samples");
  const Sizes s = sizes_of(k, eps, truth);
  const OracleInstance x = OracleInstance::make(s.truth_size, s.truth_size);
  Rng rng(seed);
  std::vector<int> samples(static_cast<std::size_t>(sample_count));
  for (int& v : samples) v = x.sample(rng);
  QueryTally tally;
  tally.copies = sample_count;
  const double pairs = static_cast<double>(sample_count) * (sample_count - 1) / 2;
  const double midpoint = 0.5 * (pairs / s.k + pairs / s.k_prime);
  const double observed = static_cast<double>(count_collisions(std::move(samples)));
  return decided(observed > midpoint ? Hypothesis::SizeK : Hypothesis::SizeKPrime, truth, tally);
}

TrialOutcome overlap_test(int n, int k, double eps, int copy_count, Hypothesis truth, std::uint64_t seed) {
  if (copy_count < 1) throw UsageError("overlap_test: need at least one copy");
  const Sizes s = sizes_of(k, eps, truth);
  const OracleInstance x = OracleInstance::make(n, s.truth_size);
  Rng rng(seed);
  const double p = static_cast<double>(x.size) / n;
  const auto hits = std::binomial_distribution<int>(copy_count, p)(rng);
  QueryTally tally;
  tally.copies = copy_count;
  const double midpoint = 0.5 * (static_cast<double>(s.k) + s.k_prime) / n;
  const double fraction = static_cast<double>(hits) / copy_count;
  return decided(fraction <= midpoint ? Hypothesis::SizeK : Hypothesis::SizeKPrime, truth, tally);
}

GroverRotation::GroverRotation(double marked_amplitude) {
  if (!(marked_amplitude > 0 && marked_amplitude < 1))
    throw UsageError("GroverRotation: marked amplitude must lie in (0, 1)");
  theta_ = std::asin(marked_amplitude);
  source_marked_ = marked_amplitude;
  source_unmarked_ = std::sqrt(1 - marked_amplitude * marked_amplitude);
  reset();
}

void GroverRotation::reset() {
  marked_ = source_marked_;
  unmarked_ = source_unmarked_;
  tally_ = {};
}

void GroverRotation::reflect_marked(ReflectionOracle oracle) {
  marked_ = -marked_;
  charge_reflections(tally_, oracle, 1);
}

void GroverRotation::reflect_source() { reflect_about(marked_, unmarked_, source_marked_, source_unmarked_); }

void GroverRotation::iterate(ReflectionOracle oracle) {
  reflect_marked(oracle);
  reflect_source();
}

GroverRotation grover_state(int n, double marked_amplitude) {
  if (n < 2) throw UsageError("grover_state: need n >= 2");
  return GroverRotation(marked_amplitude);
}

std::vector<double> full_statevector_marked_probabilities(int n, int marked, int iterations) {
  if (n < 2 || marked < 1 || marked >= n) throw UsageError("full statevector: need 1 <= marked < n");
  if (iterations < 0) throw UsageError("full statevector: negative iteration count");
  const double u = 1 / std::sqrt(static_cast<double>(n));
  std::vector<double> state(static_cast<std::size_t>(n), u);
  auto marked_probability = [&] {
    double p = 0;
    for (int i = 0; i < marked; ++i) p += state[static_cast<std::size_t>(i)] * state[static_cast<std::size_t>(i)];
    return p;
  };
  std::vector<double> out{marked_probability()};
  for (int it = 0; it < iterations; ++it) {
    for (int i = 0; i < marked; ++i) state[static_cast<std::size_t>(i)] = -state[static_cast<std::size_t>(i)];
    double overlap = 0;
    for (double v : state) overlap += v * u;
    for (double& v : state) v = 2 * overlap * u - v;
    out.push_back(marked_probability());
  }
  return out;
}

std::vector<double> phase_outcome_distribution(double a, int grid) {
  if (!(a >= 0 && a <= 1)) throw UsageError("phase_outcome_distribution: amplitude must lie in [0, 1]");
  if (grid < 2) throw UsageError("phase_outcome_distribution: grid must be >= 2");
  const double centre = grid * std::asin(std::sqrt(a)) / kPi;
  std::vector<double> p(static_cast<std::size_t>(grid));
  for (int y = 0; y < grid; ++y)
    p[static_cast<std::size_t>(y)] = 0.5 * (fejer(y - centre, grid) + fejer(y + centre, grid));
  return p;
}

Estimate amplitude_estimate_grid(double a_true, int grid, Rng& rng, ReflectionOracle oracle) {
  const std::vector<double> p = phase_outcome_distribution(a_true, grid);
  Estimate e;
  e.grid = grid;
  e.outcome = std::discrete_distribution<int>(p.begin(), p.end())(rng);
  const double s = std::sin(kPi * e.outcome / grid);
  e.estimate = s * s;
  // Controlled powers G^0 .. G^{M-1} apply the iterate M - 1 times.
  charge_reflections(e.tally, oracle, grid - 1);
  return e;
}

Estimate amplitude_estimate(double a_true, int precision_bits, std::uint64_t seed) {
  if (!(a_true > 0 && a_true < 1)) throw UsageError("amplitude_estimate: need 0 < a < 1");
  if (precision_bits < 1 || precision_bits > 20) throw UsageError("amplitude_estimate: precision_bits must be in 1..20");
  Rng rng(seed);
  return amplitude_estimate_grid(a_true, 1 << precision_bits, rng);
}

int counting_grid(double a_lo, double a_hi) {
  const double gap = std::abs(std::asin(std::sqrt(a_hi)) - std::asin(std::sqrt(a_lo)));
  if (!(gap > 0)) throw UsageError("counting_grid: hypotheses coincide");
  const double m = std::floor(2 * kPi / gap) + 1;
  if (m > (1 << 24)) throw UsageError("counting_grid: hypotheses too close to resolve");
  return std::max(2, static_cast<int>(m));
}

namespace {

// Nearest hypothesis in angle, with the outcome folded onto [0, pi/2].
Hypothesis nearest(const Estimate& e, double a_k, double a_kp) {
  const int folded = std::min(e.outcome, e.grid - e.outcome);
  const double angle = kPi * folded / e.grid;
  const double dk = std::abs(angle - std::asin(std::sqrt(a_k)));
  const double dkp = std::abs(angle - std::asin(std::sqrt(a_kp)));
  return dk <= dkp ? Hypothesis::SizeK : Hypothesis::SizeKPrime;
}

}  // namespace

TrialOutcome quantum_counting(int n, int k, double eps, Hypothesis truth, std::uint64_t seed,
                              ReflectionOracle oracle) {
  const Sizes s = sizes_of(k, eps, truth);
  if (s.k_prime > n) throw UsageError("quantum_counting: need k' <= n");
  const double a_k = static_cast<double>(s.k) / n;
  const double a_kp = static_cast<double>(s.k_prime) / n;
  Rng rng(seed);
  const Estimate e = amplitude_estimate_grid(static_cast<double>(s.truth_size) / n, counting_grid(a_k, a_kp), rng, oracle);
  TrialOutcome out = decided(nearest(e, a_k, a_kp), truth, e.tally);
  out.in_regime = theorem_regime(n, k, eps);
  return out;
}

void known_subset_counting_into(int k, double eps, int ell, Hypothesis truth, Rng& rng, ReflectionOracle oracle,
                                TrialOutcome& out) {
  const Sizes s = sizes_of(k, eps, truth);
  if (ell < 1 || ell > k) throw UsageError("known_subset_counting: need 1 <= l <= k");
  const double a_k = static_cast<double>(ell) / s.k;
  const double a_kp = static_cast<double>(ell) / s.k_prime;
  const Estimate e =
      amplitude_estimate_grid(static_cast<double>(ell) / s.truth_size, counting_grid(a_kp, a_k), rng, oracle);
  out.decision = nearest(e, a_k, a_kp);
  out.correct = out.decision == truth;
  out.tally += e.tally;
  if (2 * ell > k) out.in_regime = false;
}

TrialOutcome known_subset_counting(int n, int k, double eps, int ell, Hypothesis truth, std::uint64_t seed,
                                   ReflectionOracle oracle) {
  const Sizes s = sizes_of(k, eps, truth);
  if (s.k_prime > n) throw UsageError("known_subset_counting: need k' <= n");
  Rng rng(seed);
  TrialOutcome out;
  known_subset_counting_into(k, eps, ell, truth, rng, oracle, out);
  return out;
}

int sample_then_count_ell(int k, double eps) {
  if (!(eps > 0)) throw UsageError("eps must be positive");
  return std::max(1, ceil_int(std::cbrt(static_cast<double>(k)) / (2 * std::pow(eps, 2.0 / 3.0))));
}

TrialOutcome sample_then_count(int n, int k, double eps, Hypothesis truth, std::uint64_t seed) {
  const Sizes s = sizes_of(k, eps, truth);
  if (s.k_prime > n) throw UsageError("sample_then_count: need k' <= n");
  const int ell = sample_then_count_ell(k, eps);
  if (ell > k) throw UsageError("sample_then_count: sample target exceeds k");
  const OracleInstance x = OracleInstance::make(n, s.truth_size);
  Rng rng(seed);
  TrialOutcome out;
  out.in_regime = theorem_regime(n, k, eps) && 2 * ell <= k;
  // Measuring psi_x costs one state-generation call per sample; duplicates
  // are discarded and the draw budget is 10 l.
  std::vector<char> seen(static_cast<std::size_t>(x.size), 0);
  int distinct = 0;
  const int budget = 10 * ell;
  while (distinct < ell && out.tally.state_generation < budget) {
    const int e = x.sample(rng);
    ++out.tally.state_generation;
    if (!seen[static_cast<std::size_t>(e)]) {
      seen[static_cast<std::size_t>(e)] = 1;
      ++distinct;
    }
  }
  if (distinct < ell) {
    out.failed = true;
    out.correct = false;
    return out;
  }
  known_subset_counting_into(k, eps, ell, truth, rng, ReflectionOracle::StateGenerating, out);
  return out;
}

int bootstrap_iterations(int k, int s) {
  if (s < 1) throw UsageError("bootstrap_iterations: need |S| >= 1");
  return ceil_int(kPi / 4 * std::sqrt(static_cast<double>(k) / s));
}

TrialOutcome bootstrap_reflection_counting(int n, int k, double eps, Hypothesis truth, std::uint64_t seed,
                                           int stage_retries) {
  if (stage_retries < 0) throw UsageError("bootstrap: negative retry count");
  const Sizes s = sizes_of(k, eps, truth);
  if (s.k_prime > n) throw UsageError("bootstrap: need k' <= n");
  const int ell = ceil_int(1 / eps);
  if (ell > k) throw UsageError("bootstrap: ceil(1/eps) exceeds k");
  Rng rng(seed);
  TrialOutcome out;
  out.in_regime = theorem_regime(n, k, eps) && 2 * ell <= k;
  const double m = s.truth_size;
  // Plane spanned by psi_S (first axis) and psi_{x minus S} (second axis).
  for (int size = 1; size < ell; ++size) {
    const double x0 = std::sqrt(size / m);
    const double x1 = std::sqrt(1 - size / m);
    // The iteration count can only depend on what the algorithm knows, so it
    // uses k rather than the unknown |x|.
    const int iterations = bootstrap_iterations(k, size);
    bool grown = false;
    for (int attempt = 0; attempt <= stage_retries && !grown; ++attempt) {
      double s0 = 1;
      double s1 = 0;
      for (int it = 0; it < iterations; ++it) {
        reflect_about(s0, s1, x0, x1);
        reflect_about(s0, s1, 1, 0);
      }
      out.tally.reflections += iterations;
      grown = std::bernoulli_distribution(std::min(1.0, s1 * s1))(rng);
    }
    if (!grown) {
      out.failed = true;
      out.correct = false;
      return out;
    }
  }
  known_subset_counting_into(k, eps, ell, truth, rng, ReflectionOracle::Reflecting, out);
  return out;
}

std::string_view procedure_name(Procedure p) {
  switch (p) {
    case Procedure::Coupon: return "coupon";
    case Procedure::Collision: return "collision";
    case Procedure::Overlap: return "overlap";
    case Procedure::QCount: return "qcount";
    case Procedure::Subset: return "subset";
    case Procedure::SampleCount: return "sample-count";
    case Procedure::Bootstrap: return "bootstrap";
  }
  return "?";
}

Procedure procedure_from_name(std::string_view name) {
  for (Procedure p : {Procedure::Coupon, Procedure::Collision, Procedure::Overlap, Procedure::QCount,
                      Procedure::Subset, Procedure::SampleCount, Procedure::Bootstrap})
    if (procedure_name(p) == name) return p;
  throw UsageError("unknown procedure '" + std::string(name) + "'");
}

int default_budget(Procedure p, const SimulationParams& params) {
  switch (p) {
    case Procedure::Coupon: return 5 * params.k;
    case Procedure::Collision: return std::max(2, ceil_int(8 * std::sqrt(static_cast<double>(params.k)) / params.eps));
    case Procedure::Overlap:
      return std::max(1, ceil_int(64.0 * params.n / (params.k * params.eps * params.eps)));
    default: return 0;
  }
}

namespace {

TrialOutcome run_once(Procedure p, const SimulationParams& q, Hypothesis truth, std::uint64_t seed) {
  const int budget = q.budget > 0 ? q.budget : default_budget(p, q);
  switch (p) {
    case Procedure::Coupon: return coupon_test(q.k, q.eps, budget, truth, seed);
    case Procedure::Collision: return collision_test(q.k, q.eps, budget, truth, seed);
    case Procedure::Overlap: return overlap_test(q.n, q.k, q.eps, budget, truth, seed);
    case Procedure::QCount: return quantum_counting(q.n, q.k, q.eps, truth, seed, q.oracle);
    case Procedure::Subset: return known_subset_counting(q.n, q.k, q.eps, q.ell, truth, seed, q.oracle);
    case Procedure::SampleCount: return sample_then_count(q.n, q.k, q.eps, truth, seed);
    case Procedure::Bootstrap: return bootstrap_reflection_counting(q.n, q.k, q.eps, truth, seed, q.stage_retries);
  }
  throw UsageError("unknown procedure");
}

}  // namespace

TrialOutcome run_trial(Procedure p, const SimulationParams& params, Hypothesis truth, std::uint64_t seed) {
  if (params.repeat < 1) throw UsageError("repeat must be >= 1");
  if (params.repeat == 1) return run_once(p, params, truth, seed);
  TrialOutcome out;
  int votes_k = 0;
  int votes_kp = 0;
  for (int r = 0; r < params.repeat; ++r) {
    const TrialOutcome one = run_once(p, params, truth, trial_seed(seed, static_cast<std::uint64_t>(r)));
    out.tally += one.tally;
    out.in_regime = out.in_regime && one.in_regime;
    if (one.failed) continue;
    (one.decision == Hypothesis::SizeK ? votes_k : votes_kp)++;
  }
  if (votes_k + votes_kp == 0) {
    out.failed = true;
    out.correct = false;
    return out;
  }
  out.decision = votes_kp > votes_k ? Hypothesis::SizeKPrime : Hypothesis::SizeK;
  out.correct = out.decision == truth;
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  Rng rng(seq);
  return rng();
}

std::vector<CampaignTrial> run_campaign(Procedure p, const SimulationParams& params, std::int64_t trials,
                                        std::uint64_t master_seed, int jobs) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  if (jobs < 1) throw UsageError("jobs must be >= 1");
  // Validate parameters once up front so that usage errors surface here
  // rather than inside a worker.
  (void)run_trial(p, params, Hypothesis::SizeK, master_seed);

  std::vector<CampaignTrial> out(static_cast<std::size_t>(trials));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t i = next++; i < trials; i = next++) {
      CampaignTrial& t = out[static_cast<std::size_t>(i)];
      t.index = i;
      t.truth = i % 2 == 0 ? Hypothesis::SizeK : Hypothesis::SizeKPrime;
      t.outcome = run_trial(p, params, t.truth, trial_seed(master_seed, static_cast<std::uint64_t>(i)));
    }
  };
  const int threads = static_cast<int>(std::min<std::int64_t>(jobs, trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

CampaignSummary summarize(const std::vector<CampaignTrial>& trials) {
  CampaignSummary s;
  s.trials = static_cast<std::int64_t>(trials.size());
  if (trials.empty()) return s;
  std::int64_t ok = 0, ok_k = 0, n_k = 0, ok_kp = 0, n_kp = 0;
  QueryTally total;
  for (const auto& t : trials) {
    const bool c = t.outcome.correct;
    ok += c;
    if (t.truth == Hypothesis::SizeK) {
      ++n_k;
      ok_k += c;
    } else {
      ++n_kp;
      ok_kp += c;
    }
    s.failures += t.outcome.failed;
    total += t.outcome.tally;
  }
  const double n = static_cast<double>(s.trials);
  s.success_rate = ok / n;
  s.standard_error = std::sqrt(s.success_rate * (1 - s.success_rate) / n);
  s.success_rate_k = n_k ? static_cast<double>(ok_k) / n_k : 0;
  s.success_rate_k_prime = n_kp ? static_cast<double>(ok_kp) / n_kp : 0;
  s.mean_copies = total.copies / n;
  s.mean_state_generation = total.state_generation / n;
  s.mean_reflections = total.reflections / n;
  s.mean_membership = total.membership / n;
  return s;
}

}  // namespace countbench::simulate
