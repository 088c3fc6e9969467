#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "countbench/errors.hpp"
#include "countbench/simulate.hpp"

using namespace countbench;
using namespace countbench::simulate;

namespace {

constexpr double kPi = std::numbers::pi;

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

double rate(Procedure p, const SimulationParams& q, std::int64_t trials, std::uint64_t seed = 1) {
  return summarize(run_campaign(p, q, trials, seed, 4)).success_rate;
}

}  // namespace

TEST(KPrime, Rounding) {
  EXPECT_EQ(k_prime_of(32, 1), 64);
  EXPECT_EQ(k_prime_of(64, 0.5), 96);
  EXPECT_THROW(k_prime_of(10, 0.01), UsageError);
  EXPECT_THROW(k_prime_of(10, 0), UsageError);
}

TEST(Coupon, OneSidedError) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto o = coupon_test(16, 1, 200, Hypothesis::SizeK, s);
    EXPECT_EQ(o.decision, Hypothesis::SizeK);
    EXPECT_EQ(o.tally.copies, 200);
  }
}

TEST(Coupon, FullCollectionFindsTheLargeSet) {
  // k' H(k') samples for k = 10, eps = 1.
  const int kp = 20;
  double h = 0;
  for (int i = 1; i <= kp; ++i) h += 1.0 / i;
  const int budget = static_cast<int>(std::ceil(kp * h));
  int right = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) right += coupon_test(10, 1, budget, Hypothesis::SizeKPrime, s).correct;
  EXPECT_GE(right / 10000.0, 0.99);
}

TEST(Coupon, ZeroBudget) {
  EXPECT_EQ(coupon_test(5, 1, 0, Hypothesis::SizeKPrime, 1).decision, Hypothesis::SizeK);
}

TEST(Collision, CountsPairs) {
  EXPECT_EQ(count_collisions({4, 4, 4, 4}), 6);
  EXPECT_EQ(count_collisions({1, 2, 3}), 0);
  EXPECT_EQ(count_collisions({1, 2, 1, 2, 1}), 4);
  EXPECT_THROW(collision_test(8, 1, 1, Hypothesis::SizeK, 1), UsageError);
}

TEST(Collision, SucceedsForBothHypotheses) {
  SimulationParams q;
  q.k = 256;
  q.eps = 0.5;
  EXPECT_EQ(default_budget(Procedure::Collision, q), 256);
  const auto s = summarize(run_campaign(Procedure::Collision, q, 10000, 3, 4));
  EXPECT_GE(s.success_rate_k, 2.0 / 3);
  EXPECT_GE(s.success_rate_k_prime, 2.0 / 3);
}

TEST(Collision, MeanPairCountMatchesExpectation) {
  const int k = 64, ell = 40;
  const OracleInstance x = OracleInstance::make(k, k);
  Rng rng(99);
  double total = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    std::vector<int> samples(ell);
    for (int& v : samples) v = x.sample(rng);
    total += static_cast<double>(count_collisions(samples));
  }
  const double expected = ell * (ell - 1) / (2.0 * k);
  EXPECT_NEAR(total / reps, expected, 0.02 * expected);
}

TEST(Overlap, CertainSuccessWhenXIsEverything) {
  // |x| = n: every copy succeeds.
  const auto o = overlap_test(4, 2, 1, 50, Hypothesis::SizeKPrime, 1);
  EXPECT_EQ(o.decision, Hypothesis::SizeKPrime);
  EXPECT_EQ(o.tally.copies, 50);
}

TEST(Overlap, SucceedsForBothHypotheses) {
  SimulationParams q;
  q.n = 1024;
  q.k = 64;
  q.eps = 1;
  EXPECT_EQ(default_budget(Procedure::Overlap, q), 1024);
  const auto s = summarize(run_campaign(Procedure::Overlap, q, 10000, 5, 4));
  EXPECT_GE(s.success_rate_k, 2.0 / 3);
  EXPECT_GE(s.success_rate_k_prime, 2.0 / 3);
}

TEST(Overlap, SingleCopyIsUninformative) {
  SimulationParams q;
  q.n = 1000;
  q.k = 500;
  q.eps = 0.002;
  q.budget = 1;
  const auto s = summarize(run_campaign(Procedure::Overlap, q, 20000, 6, 4));
  EXPECT_NEAR(s.success_rate, 0.5, 0.02);
}

TEST(Grover, TextbookRotation) {
  auto g = grover_state(16, 0.5);
  EXPECT_NEAR(g.theta(), kPi / 6, 1e-15);
  EXPECT_NEAR(g.marked_amplitude(), 0.5, 1e-15);
  g.iterate();
  EXPECT_NEAR(g.marked_amplitude(), 1.0, 1e-14);
  EXPECT_EQ(g.tally().membership, 1);
  EXPECT_THROW(GroverRotation(1.0), UsageError);
  EXPECT_THROW(GroverRotation(0.0), UsageError);
}

TEST(Grover, ClosedFormAfterIterations) {
  auto g = grover_state(1024, std::sqrt(16.0 / 1024));
  for (int j = 1; j <= 50; ++j) {
    g.iterate(ReflectionOracle::Reflecting);
    const double expected = std::sin((2 * j + 1) * g.theta());
    EXPECT_NEAR(g.marked_probability(), expected * expected, 1e-12);
  }
  EXPECT_EQ(g.tally().reflections, 50);
}

TEST(Grover, AgreesWithFullStatevector) {
  double worst = 0;
  for (int n = 2; n <= 64; ++n)
    for (int m = 1; m < n; ++m) {
      auto g = grover_state(n, std::sqrt(static_cast<double>(m) / n));
      const auto full = full_statevector_marked_probabilities(n, m, 50);
      for (int j = 0; j <= 50; ++j) {
        worst = std::max(worst, std::abs(g.marked_probability() - full[static_cast<std::size_t>(j)]));
        g.iterate();
      }
    }
  EXPECT_LE(worst, 1e-12);
}

TEST(AmplitudeEstimate, DistributionSumsToOne) {
  for (double a : {0.0, 0.01, 0.3, 0.5, 0.99, 1.0}) {
    double total = 0;
    for (double p : phase_outcome_distribution(a, 37)) total += p;
    EXPECT_NEAR(total, 1, 1e-12) << a;
  }
}

TEST(AmplitudeEstimate, OnGridIsExact) {
  const int m = 3, grid = 16;
  const double a = std::pow(std::sin(kPi * m / grid), 2);
  const auto p = phase_outcome_distribution(a, grid);
  EXPECT_NEAR(p[m] + p[grid - m], 1, 1e-12);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto e = amplitude_estimate(a, 4, s);
    EXPECT_TRUE(e.outcome == m || e.outcome == grid - m);
    EXPECT_NEAR(e.estimate, a, 1e-12);
  }
}

TEST(AmplitudeEstimate, ErrorBoundMass) {
  const double a = 0.25;
  const int grid = 16;
  const double bound = 2 * kPi * std::sqrt(a * (1 - a)) / grid + kPi * kPi / (grid * grid);
  int within = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) within += std::abs(amplitude_estimate(a, 4, s).estimate - a) <= bound;
  EXPECT_GE(within / 10000.0, 8 / (kPi * kPi));
}

TEST(AmplitudeEstimate, TallyAndRange) {
  EXPECT_EQ(amplitude_estimate(0.3, 1, 1).tally.reflections, 1);
  EXPECT_EQ(amplitude_estimate(0.3, 6, 1).tally.reflections, 63);
  EXPECT_THROW(amplitude_estimate(0.0, 4, 1), UsageError);
  EXPECT_THROW(amplitude_estimate(0.5, 21, 1), UsageError);
}

TEST(QuantumCounting, SucceedsWithinTheReflectionBudget) {
  SimulationParams q;
  q.n = 1024;
  q.k = 16;
  q.eps = 1;
  const auto s = summarize(run_campaign(Procedure::QCount, q, 1000, 7, 4));
  EXPECT_GE(s.success_rate, 2.0 / 3);
  // Calibrated constant: M ~ 4 pi / eps * sqrt(n/k), so C = 16 leaves headroom.
  EXPECT_LE(s.mean_reflections, 16 * std::sqrt(1024.0 / 16));
}

TEST(QuantumCounting, OracleChoiceMovesTheTally) {
  const auto refl = quantum_counting(1024, 16, 1, Hypothesis::SizeK, 3, ReflectionOracle::Reflecting);
  const auto memb = quantum_counting(1024, 16, 1, Hypothesis::SizeK, 3, ReflectionOracle::Membership);
  const auto gen = quantum_counting(1024, 16, 1, Hypothesis::SizeK, 3, ReflectionOracle::StateGenerating);
  EXPECT_EQ(memb.tally.membership, refl.tally.reflections);
  EXPECT_EQ(gen.tally.state_generation, 2 * refl.tally.reflections);
  EXPECT_EQ(refl.decision, memb.decision);
}

TEST(QuantumCounting, DoublingNScalesBySqrtTwo) {
  std::vector<double> ns, tallies;
  for (int n : {1024, 2048, 4096, 8192}) {
    const auto o = quantum_counting(n, 16, 1, Hypothesis::SizeK, 1);
    ns.push_back(n);
    tallies.push_back(static_cast<double>(o.tally.reflections));
  }
  for (std::size_t i = 1; i < ns.size(); ++i) EXPECT_NEAR(tallies[i] / tallies[i - 1], std::sqrt(2.0), 0.25 * std::sqrt(2.0));
  EXPECT_NEAR(loglog_slope(ns, tallies), 0.5, 0.08);
}

TEST(QuantumCounting, HugeGapUsesATinyGrid) {
  const auto o = quantum_counting(1024, 1, 511, Hypothesis::SizeKPrime, 2);
  EXPECT_LE(o.tally.reflections, 15);
  EXPECT_FALSE(o.in_regime);
}

TEST(KnownSubset, SucceedsAndScales) {
  SimulationParams q;
  q.n = 4096;
  q.k = 64;
  q.eps = 0.5;
  q.ell = 16;
  const auto s = summarize(run_campaign(Procedure::Subset, q, 1000, 8, 4));
  EXPECT_GE(s.success_rate, 2.0 / 3);
  EXPECT_EQ(s.mean_copies, 0);
  EXPECT_LE(s.mean_reflections, 16 / q.eps * std::sqrt(64.0 / 16));

  std::vector<double> ells, tallies;
  for (int ell : {2, 4, 8, 16}) {
    ells.push_back(ell);
    tallies.push_back(double(known_subset_counting(4096, 64, 0.5, ell, Hypothesis::SizeK, 1).tally.reflections));
  }
  EXPECT_NEAR(loglog_slope(ells, tallies), -0.5, 0.08);
}

TEST(KnownSubset, FullSetIsFlaggedButWorks) {
  const auto o = known_subset_counting(100, 10, 1, 10, Hypothesis::SizeK, 4);
  EXPECT_FALSE(o.in_regime);
  EXPECT_TRUE(o.correct);
  EXPECT_THROW(known_subset_counting(100, 10, 1, 11, Hypothesis::SizeK, 4), UsageError);
  EXPECT_THROW(known_subset_counting(100, 10, 1, 0, Hypothesis::SizeK, 4), UsageError);
}

TEST(SampleThenCount, EllFormula) {
  EXPECT_EQ(sample_then_count_ell(8, 1), 1);
  EXPECT_EQ(sample_then_count_ell(64, 0.25), 6);
}

TEST(SampleThenCount, SucceedsWithoutMembershipQueries) {
  SimulationParams q;
  q.n = 4096;
  q.k = 64;
  q.eps = 0.25;
  const auto s = summarize(run_campaign(Procedure::SampleCount, q, 1000, 9, 4));
  EXPECT_GE(s.success_rate, 2.0 / 3);
  EXPECT_EQ(s.mean_membership, 0);
  EXPECT_EQ(s.mean_reflections, 0);
  EXPECT_LE(s.mean_state_generation, 64 * std::cbrt(64.0) / std::pow(0.25, 2.0 / 3));
}

TEST(Bootstrap, EpsOneSkipsGrowth) {
  const auto o = bootstrap_reflection_counting(4096, 64, 1, Hypothesis::SizeK, 1);
  // Only the final estimation: M - 1 reflections for l = 1.
  const int grid = counting_grid(1.0 / 128, 1.0 / 64);
  EXPECT_EQ(o.tally.reflections, grid - 1);
}

TEST(Bootstrap, SucceedsWithinBudget) {
  SimulationParams q;
  q.n = 4096;
  q.k = 64;
  q.eps = 0.125;
  const auto s = summarize(run_campaign(Procedure::Bootstrap, q, 1000, 10, 4));
  EXPECT_GE(s.success_rate, 2.0 / 3);
  const double scale = std::sqrt(64.0 * 8) + 8 * std::sqrt(64.0 / 8);
  EXPECT_LE(s.mean_reflections, 16 * scale);
}

TEST(Bootstrap, NoRetriesCanFail) {
  // With zero retries a stage occasionally misses; the trial is then marked failed.
  SimulationParams q;
  q.n = 4096;
  q.k = 64;
  q.eps = 0.125;
  q.stage_retries = 0;
  const auto trials = run_campaign(Procedure::Bootstrap, q, 400, 11, 4);
  for (const auto& t : trials)
    if (t.outcome.failed) EXPECT_FALSE(t.outcome.correct);
}

TEST(Campaign, DeterministicAcrossThreadCounts) {
  SimulationParams q;
  q.n = 1024;
  q.k = 16;
  q.eps = 1;
  const auto a = run_campaign(Procedure::QCount, q, 200, 42, 1);
  const auto b = run_campaign(Procedure::QCount, q, 200, 42, 8);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].outcome.decision, b[i].outcome.decision);
    EXPECT_EQ(a[i].outcome.tally.reflections, b[i].outcome.tally.reflections);
  }
  EXPECT_NE(trial_seed(42, 0), trial_seed(42, 1));
  EXPECT_NE(trial_seed(42, 0), trial_seed(43, 0));
}

TEST(Campaign, MajorityVoteImprovesAccuracy) {
  SimulationParams q;
  q.k = 256;
  q.eps = 0.5;
  q.budget = 120;  // deliberately weak
  const double single = rate(Procedure::Collision, q, 4000);
  q.repeat = 5;
  const double voted = rate(Procedure::Collision, q, 4000);
  EXPECT_GT(voted, single);
}

TEST(Campaign, Errors) {
  SimulationParams q;
  EXPECT_THROW(run_campaign(Procedure::QCount, q, 0, 1, 1), UsageError);
  EXPECT_THROW(procedure_from_name("nope"), UsageError);
  EXPECT_EQ(procedure_from_name("sample-count"), Procedure::SampleCount);
}
