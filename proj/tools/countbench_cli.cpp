// countbench: verification sweeps, bound reports and simulation campaigns.
//
//   countbench verify   [--instance n,k,k' ...] [--t ...] [--ell ...] [--check ID ...]
//   countbench bounds   --n N --k K --eps E [--ell L] [--ell-prime L']
//   countbench simulate --procedure P [--n N --k K --eps E --ell L --trials T ...]
//
// Shared flags may come before or after the subcommand. Values from --config
// are read first and any flag given on the command line replaces its key.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "countbench/errors.hpp"
#include "countbench/workbench.hpp"

namespace wb = countbench::workbench;

namespace {

template <typename T>
std::string to_text(const T& v) {
  if constexpr (std::is_same_v<T, std::string>)
    return v;
  else if constexpr (std::is_floating_point_v<T>)
    return wb::format_double(v);
  else
    return std::to_string(v);
}

// Command-line values become config entries so that one code path handles
// both sources.
struct Overrides {
  wb::Config config;

  template <typename T>
  void scalar(const std::string& key, const std::optional<T>& v) {
    if (v) config.set(key, {to_text(*v)});
  }
  void list(const std::string& key, const std::vector<std::string>& v) {
    if (!v.empty()) config.set(key, v);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversary-bound verification workbench for approximate counting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wb::kVersion);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> tol_norm, tol_exact, threshold, cprime;
  bool timing = false;

  auto add_shared = [&](CLI::App* a) {
    a->add_option("--config", config_path, "key=value config file");
    a->add_option("--out", out_dir, "output directory");
    a->add_option("--seed", seed, "master seed (falls back to WORKBENCH_SEED)");
    a->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 1024));
    a->add_option("--tol-norm", tol_norm, "tolerance for norm checks (default 1e-8)");
    a->add_option("--tol-exact", tol_exact, "tolerance for identity checks (default 1e-10)");
    a->add_option("--feasibility-threshold", threshold, "Psi-power threshold (default 0.25)");
    a->add_option("--cprime", cprime, "constant C' in t = max{2l, C' l', 1/(5 eps)} (default 8)");
    a->add_flag("--timing", timing, "record per-check wall time in the millis column");
  };

  auto* verify = app.add_subcommand("verify", "cross-check closed forms against brute force");
  std::vector<std::string> instances, ts, ells, checks;
  verify->add_option("--instance", instances, "n,k,k' (repeatable)");
  verify->add_option("--t", ts, "t values");
  verify->add_option("--ell", ells, "l values");
  verify->add_option("--check", checks, "check ids (default: all)");

  auto* bounds = app.add_subcommand("bounds", "evaluate the resource tradeoff and dual feasibility");
  std::optional<double> b_n, b_k, b_eps;
  std::optional<int> b_ell, b_ell_prime;
  bounds->add_option("--n", b_n);
  bounds->add_option("--k", b_k);
  bounds->add_option("--eps", b_eps);
  bounds->add_option("--ell", b_ell, "copies / samples l");
  bounds->add_option("--ell-prime", b_ell_prime, "reflection uses l'");

  auto* sim = app.add_subcommand("simulate", "run a simulation campaign");
  std::optional<std::string> procedure, oracle;
  std::optional<int> s_n, s_k, s_ell, s_budget, s_repeat, s_retries;
  std::optional<double> s_eps;
  std::optional<long long> s_trials;
  sim->add_option("--procedure", procedure, "coupon|collision|overlap|qcount|subset|sample-count|bootstrap");
  sim->add_option("--n", s_n);
  sim->add_option("--k", s_k);
  sim->add_option("--eps", s_eps);
  sim->add_option("--ell", s_ell, "known elements for subset");
  sim->add_option("--budget", s_budget, "samples or copies for the classical procedures");
  sim->add_option("--trials", s_trials);
  sim->add_option("--repeat", s_repeat, "majority of r");
  sim->add_option("--retries", s_retries, "amplification retries per bootstrap stage");
  sim->add_option("--oracle", oracle, "reflecting|membership|state-generating");

  for (auto* a : {verify, bounds, sim}) add_shared(a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return wb::kExitUsage;
  }

  try {
    wb::Config config;
    if (!config_path.empty()) config = wb::Config::load(config_path);

    Overrides o;
    o.scalar("out", out_dir);
    o.scalar("seed", seed);
    o.scalar("jobs", jobs);
    o.scalar("tol_norm", tol_norm);
    o.scalar("tol_exact", tol_exact);
    o.scalar("feasibility_threshold", threshold);
    o.scalar("cprime", cprime);
    if (timing) o.config.set("timing", {"1"});

    if (*verify) {
      o.list("instance", instances);
      o.list("t", ts);
      o.list("ell", ells);
      o.list("check", checks);
      config.overlay(o.config);
      return wb::cmd_verify(wb::sweep_from_config(config), std::cout, std::cerr);
    }
    if (*bounds) {
      o.scalar("n", b_n);
      o.scalar("k", b_k);
      o.scalar("eps", b_eps);
      o.scalar("ell", b_ell);
      o.scalar("ell_prime", b_ell_prime);
      config.overlay(o.config);
      return wb::cmd_bounds(wb::bounds_from_config(config), std::cout, std::cerr);
    }
    o.scalar("procedure", procedure);
    o.scalar("oracle", oracle);
    o.scalar("n", s_n);
    o.scalar("k", s_k);
    o.scalar("eps", s_eps);
    o.scalar("ell", s_ell);
    o.scalar("budget", s_budget);
    o.scalar("trials", s_trials);
    o.scalar("repeat", s_repeat);
    o.scalar("retries", s_retries);
    config.overlay(o.config);
    return wb::cmd_simulate(wb::simulate_from_config(config), std::cout, std::cerr);
  } catch (const countbench::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return wb::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wb::kExitUsage;
  }
}
