#pragma once

// Plumbing behind the command-line tool: flat key=value configs, the
// verification sweep, bound reports and simulation campaigns, with CSV rows
// and JSON summaries. Exit codes: 0 pass, 1 failed check, 2 usage error.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "countbench/adversary.hpp"
#include "countbench/bruteforce.hpp"
#include "countbench/simulate.hpp"

namespace countbench::workbench {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Flat key=value text. '#' starts a comment line; a repeated key appends to
/// its list; an empty value clears the list. Later layers override earlier
/// ones key by key.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  /// Append one value (an empty value clears the key).
  void add(const std::string& key, const std::string& value);
  /// Replace the whole list for key.
  void set(const std::string& key, std::vector<std::string> values);
  /// Keys of `other` replace the same keys here.
  void overlay(const Config& other);

  bool has(const std::string& key) const;
  const std::vector<std::string>& values(const std::string& key) const;
  /// Last value of key; UsageError if absent.
  const std::string& last(const std::string& key) const;
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// Strict scalar parsing; UsageError names the key on failure.
double parse_double(const std::string& key, const std::string& text);
std::int64_t parse_int(const std::string& key, const std::string& text);
std::uint64_t parse_u64(const std::string& key, const std::string& text);

/// Seed precedence: `seed` key, then WORKBENCH_SEED, then `fallback`.
std::uint64_t resolve_seed(const Config& config, std::uint64_t fallback = 1);

struct SweepConfig {
  std::vector<adversary::ProblemInstance> instances;
  std::vector<double> ts;
  std::vector<int> ells;
  std::vector<bruteforce::CheckId> checks;
  bruteforce::Tolerances tolerances;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool timing = false;
  std::string out_dir;
};

/// The acceptance sweep: eight instances, t in {1,2,3}, l = 1, all checks.
SweepConfig default_sweep();

/// Keys: instance=n,k,k' (repeatable); grid_n / grid_k / grid_kprime as
/// a:b ranges or values (every valid combination is added); t; ell; check;
/// tol_norm; tol_exact; seed; jobs; timing; out. Missing keys keep the
/// default sweep's values, except that any instance or grid key replaces
/// the default instance list.
SweepConfig sweep_from_config(const Config& config);

/// PSI_POWER needs t >= 2l, so it runs at min(l, floor(t/2)).
int effective_ell(bruteforce::CheckId check, double t, int ell);

/// Every check on every instance, sorted by (check, n, k, k', t, l).
std::vector<bruteforce::DiscrepancyReport> run_verify(const SweepConfig& sweep);

void write_verify_csv(std::ostream& os, const std::vector<bruteforce::DiscrepancyReport>& rows, bool timing);
std::string verify_json(const SweepConfig& sweep, const std::vector<bruteforce::DiscrepancyReport>& rows);

/// Runs the sweep. Without an out directory the CSV goes to `out`;
/// otherwise verify.csv and verify.json are written there.
int cmd_verify(const SweepConfig& sweep, std::ostream& out, std::ostream& err);

struct BoundsArgs {
  double n = 0;
  double k = 0;
  double eps = 0;
  int ell = 0;
  int ell_prime = 0;
  double c_prime = 8;
  double threshold = adversary::kDefaultFeasibilityThreshold;
};

/// Keys n, k, eps, ell, ell_prime, cprime, feasibility_threshold.
BoundsArgs bounds_from_config(const Config& config);
std::string bounds_json(const BoundsArgs& args, const adversary::BoundReport& report);
/// Prints the report as JSON. Exit 2 for eps <= 0, n or k < 1, or negative l, l'.
int cmd_bounds(const BoundsArgs& args, std::ostream& out, std::ostream& err);

struct SimulateArgs {
  simulate::Procedure procedure = simulate::Procedure::QCount;
  simulate::SimulationParams params;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir;
};

/// Keys procedure, n, k, eps, ell, budget, repeat, retries, oracle
/// (reflecting | membership | state-generating), trials, seed, jobs, out.
SimulateArgs simulate_from_config(const Config& config);

void write_trials_csv(std::ostream& os, const std::vector<simulate::CampaignTrial>& trials);
std::string simulate_json(const SimulateArgs& args, const simulate::CampaignSummary& summary);

/// Runs the campaign. Without an out directory the summary JSON goes to
/// `out`; otherwise trials.csv and summary.json are written there.
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

/// Fixed, locale-independent rendering used in every CSV cell.
std::string format_double(double v);

}  // namespace countbench::workbench
