#include "countbench/workbench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "countbench/errors.hpp"
#include "json.hpp"

namespace countbench::workbench {

using bruteforce::CheckId;
using bruteforce::DiscrepancyReport;
using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

// "a:b" expands to a..b, anything else is a single value.
std::vector<int> expand_range(const std::string& key, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {static_cast<int>(parse_int(key, text))};
  const auto lo = parse_int(key, text.substr(0, colon));
  const auto hi = parse_int(key, text.substr(colon + 1));
  if (hi < lo) throw UsageError(key + ": empty range '" + text + "'");
  if (hi - lo > 10000) throw UsageError(key + ": range too long");
  std::vector<int> out;
  for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<int> expand_all(const Config& c, const std::string& key) {
  std::vector<int> out;
  for (const auto& v : c.values(key))
    for (int x : expand_range(key, v)) out.push_back(x);
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw UsageError(key + ": expected a boolean, got '" + text + "'");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << text;
  if (!f) throw UsageError("write failed for " + path.string());
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

}  // namespace

// --- Config ----------------------------------------------------------------

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    c.add(key, trim(t.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void Config::add(const std::string& key, const std::string& value) {
  auto& list = entries_[key];
  if (value.empty())
    list.clear();
  else
    list.push_back(value);
}

void Config::set(const std::string& key, std::vector<std::string> values) { entries_[key] = std::move(values); }

void Config::overlay(const Config& other) {
  for (const auto& [key, values] : other.entries_) entries_[key] = values;
}

bool Config::has(const std::string& key) const {
  const auto it = entries_.find(key);
  return it != entries_.end() && !it->second.empty();
}

const std::vector<std::string>& Config::values(const std::string& key) const {
  static const std::vector<std::string> empty;
  const auto it = entries_.find(key);
  return it == entries_.end() ? empty : it->second;
}

const std::string& Config::last(const std::string& key) const {
  if (!has(key)) throw UsageError("missing config key '" + key + "'");
  return values(key).back();
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v))
    throw UsageError(key + ": expected a number, got '" + text + "'");
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError(key + ": expected an integer, got '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError(key + ": expected an unsigned integer, got '" + text + "'");
  return v;
}

std::uint64_t resolve_seed(const Config& config, std::uint64_t fallback) {
  if (config.has("seed")) return parse_u64("seed", config.last("seed"));
  if (const char* env = std::getenv("WORKBENCH_SEED"); env && *env) return parse_u64("WORKBENCH_SEED", env);
  return fallback;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// --- verify ----------------------------------------------------------------

SweepConfig default_sweep() {
  SweepConfig s;
  for (auto [n, k, kp] : {std::tuple{6, 1, 2}, {7, 1, 2}, {8, 2, 3}, {9, 2, 3}, {10, 2, 3}, {10, 3, 4}, {12, 2, 4},
                          {12, 3, 4}})
    s.instances.push_back(adversary::ProblemInstance::make(n, k, kp));
  s.ts = {1, 2, 3};
  s.ells = {1};
  s.checks.assign(bruteforce::kAllChecks.begin(), bruteforce::kAllChecks.end());
  return s;
}

SweepConfig sweep_from_config(const Config& c) {
  SweepConfig s = default_sweep();
  const bool has_grid = c.has("grid_n") || c.has("grid_k") || c.has("grid_kprime");
  if (c.has("instance") || has_grid || c.entries().count("instance")) s.instances.clear();
  for (const auto& text : c.values("instance")) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw UsageError("instance: expected n,k,k' but got '" + text + "'");
    s.instances.push_back(adversary::ProblemInstance::make(static_cast<int>(parse_int("instance", parts[0])),
                                                           static_cast<int>(parse_int("instance", parts[1])),
                                                           static_cast<int>(parse_int("instance", parts[2]))));
  }
  if (has_grid) {
    if (!c.has("grid_n") || !c.has("grid_k") || !c.has("grid_kprime"))
      throw UsageError("grid_n, grid_k and grid_kprime must be given together");
    for (int n : expand_all(c, "grid_n"))
      for (int k : expand_all(c, "grid_k"))
        for (int kp : expand_all(c, "grid_kprime"))
          if (k >= 1 && kp > k && n >= 2 * kp + 1) s.instances.push_back(adversary::ProblemInstance::make(n, k, kp));
  }
  if (c.entries().count("t")) {
    s.ts.clear();
    for (const auto& v : c.values("t")) {
      const double t = parse_double("t", v);
      if (t < 1) throw UsageError("t must be >= 1");
      s.ts.push_back(t);
    }
  }
  if (c.entries().count("ell")) {
    s.ells.clear();
    for (const auto& v : c.values("ell")) {
      const auto l = parse_int("ell", v);
      if (l < 0 || l > 16) throw UsageError("ell must be in 0..16");
      s.ells.push_back(static_cast<int>(l));
    }
  }
  if (c.entries().count("check")) {
    s.checks.clear();
    for (const auto& v : c.values("check")) s.checks.push_back(bruteforce::check_from_name(v));
  }
  if (c.has("tol_norm")) s.tolerances.norm = parse_double("tol_norm", c.last("tol_norm"));
  if (c.has("tol_exact")) s.tolerances.exact = parse_double("tol_exact", c.last("tol_exact"));
  if (!(s.tolerances.norm >= 0) || !(s.tolerances.exact >= 0)) throw UsageError("tolerances must be nonnegative");
  s.seed = resolve_seed(c);
  if (c.has("jobs")) {
    const auto j = parse_int("jobs", c.last("jobs"));
    if (j < 1 || j > 1024) throw UsageError("jobs must be in 1..1024");
    s.jobs = static_cast<int>(j);
  }
  if (c.has("timing")) s.timing = parse_bool("timing", c.last("timing"));
  if (c.has("out")) s.out_dir = c.last("out");
  if (s.instances.empty()) throw UsageError("empty instance list");
  if (s.ts.empty()) throw UsageError("empty t list");
  if (s.ells.empty()) throw UsageError("empty ell list");
  if (s.checks.empty()) throw UsageError("empty check list");
  return s;
}

int effective_ell(CheckId check, double t, int ell) {
  if (check != CheckId::PSI_POWER) return ell;
  return std::min(ell, static_cast<int>(std::floor(t / 2)));
}

std::vector<DiscrepancyReport> run_verify(const SweepConfig& sweep) {
  // One work item per instance, so each context is built once and shared by
  // its checks; results land in per-instance slots and are sorted at the end.
  std::vector<std::vector<DiscrepancyReport>> slots(sweep.instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sweep.instances.size(); i = next++) {
      const bruteforce::InstanceContext ctx(sweep.instances[i]);
      for (double t : sweep.ts)
        for (int ell : sweep.ells)
          for (CheckId check : sweep.checks) {
            const int l = effective_ell(check, t, ell);
            // PSI_POWER can collapse several l onto the same capped value.
            auto& slot = slots[i];
            const bool seen = std::any_of(slot.begin(), slot.end(), [&](const DiscrepancyReport& r) {
              return r.check == check && r.t == t && r.ell == l;
            });
            if (!seen) slot.push_back(bruteforce::verify(check, ctx, t, l, sweep.tolerances));
          }
    }
  };
  const int threads = std::max(1, std::min<int>(sweep.jobs, static_cast<int>(sweep.instances.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<DiscrepancyReport> rows;
  for (auto& slot : slots) rows.insert(rows.end(), slot.begin(), slot.end());
  std::stable_sort(rows.begin(), rows.end(), [](const DiscrepancyReport& a, const DiscrepancyReport& b) {
    return std::tuple(static_cast<int>(a.check), a.n, a.k, a.k_prime, a.t, a.ell) <
           std::tuple(static_cast<int>(b.check), b.n, b.k, b.k_prime, b.t, b.ell);
  });
  return rows;
}

void write_verify_csv(std::ostream& os, const std::vector<DiscrepancyReport>& rows, bool timing) {
  os << "check_id,n,k,k_prime,t,ell,closed_form,brute_force,discrepancy,pass,millis\n";
  for (const auto& r : rows) {
    os << bruteforce::check_name(r.check) << ',' << r.n << ',' << r.k << ',' << r.k_prime << ','
       << format_double(r.t) << ',' << r.ell << ',' << format_double(r.closed_form) << ','
       << format_double(r.brute_force) << ',' << format_double(r.discrepancy) << ',' << (r.pass ? 1 : 0) << ','
       << (timing ? format_double(std::round(r.millis * 1000) / 1000) : "0") << '\n';
  }
}

std::string verify_json(const SweepConfig& sweep, const std::vector<DiscrepancyReport>& rows) {
  ordered_json j;
  j["tool"] = "countbench";
  j["version"] = kVersion;
  ordered_json cfg;
  cfg["instances"] = ordered_json::array();
  for (const auto& inst : sweep.instances) cfg["instances"].push_back({inst.n, inst.k, inst.k_prime});
  cfg["t"] = sweep.ts;
  cfg["ell"] = sweep.ells;
  cfg["checks"] = ordered_json::array();
  for (CheckId c : sweep.checks) cfg["checks"].push_back(bruteforce::check_name(c));
  cfg["tol_norm"] = sweep.tolerances.norm;
  cfg["tol_exact"] = sweep.tolerances.exact;
  cfg["seed"] = sweep.seed;
  cfg["jobs"] = sweep.jobs;
  cfg["timing"] = sweep.timing;
  j["config"] = cfg;

  ordered_json checks = ordered_json::array();
  for (CheckId c : sweep.checks) {
    std::int64_t total = 0, passed = 0;
    double worst = 0;
    for (const auto& r : rows)
      if (r.check == c) {
        ++total;
        passed += r.pass;
        worst = std::max(worst, r.discrepancy);
      }
    checks.push_back({{"id", bruteforce::check_name(c)},
                      {"statement", bruteforce::check_statement(c)},
                      {"tolerance_class", bruteforce::is_norm_check(c) ? "norm" : "exact"},
                      {"tolerance", bruteforce::is_norm_check(c) ? sweep.tolerances.norm : sweep.tolerances.exact},
                      {"rows", total},
                      {"passed", passed},
                      {"max_discrepancy", worst}});
  }
  j["checks"] = checks;
  const auto passed = std::count_if(rows.begin(), rows.end(), [](const DiscrepancyReport& r) { return r.pass; });
  j["summary"] = {{"rows", rows.size()}, {"passed", passed}, {"all_pass", passed == static_cast<long>(rows.size())}};
  return j.dump(2) + "\n";
}

int cmd_verify(const SweepConfig& sweep, std::ostream& out, std::ostream& err) {
  try {
    if (sweep.instances.empty()) throw UsageError("empty instance list");
    const auto rows = run_verify(sweep);
    if (sweep.out_dir.empty()) {
      write_verify_csv(out, rows, sweep.timing);
    } else {
      const auto dir = prepare_dir(sweep.out_dir);
      std::ostringstream csv;
      write_verify_csv(csv, rows, sweep.timing);
      write_file(dir / "verify.csv", csv.str());
      write_file(dir / "verify.json", verify_json(sweep, rows));
    }
    std::size_t failed = 0;
    for (const auto& r : rows)
      if (!r.pass) {
        ++failed;
        err << "FAIL " << bruteforce::check_name(r.check) << " (" << r.n << "," << r.k << "," << r.k_prime
            << ") t=" << format_double(r.t) << " ell=" << r.ell << " discrepancy=" << format_double(r.discrepancy)
            << " tol=" << format_double(r.tolerance) << "\n";
      }
    if (failed) err << failed << " of " << rows.size() << " checks failed\n";
    return failed ? kExitFail : kExitPass;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegenerateError& e) {
    err << "degenerate instance: " << e.what() << "\n";
    return kExitFail;
  }
}

// --- bounds ----------------------------------------------------------------

BoundsArgs bounds_from_config(const Config& c) {
  BoundsArgs a;
  a.n = parse_double("n", c.last("n"));
  a.k = parse_double("k", c.last("k"));
  a.eps = parse_double("eps", c.last("eps"));
  if (c.has("ell")) a.ell = static_cast<int>(parse_int("ell", c.last("ell")));
  if (c.has("ell_prime")) a.ell_prime = static_cast<int>(parse_int("ell_prime", c.last("ell_prime")));
  if (c.has("cprime")) a.c_prime = parse_double("cprime", c.last("cprime"));
  if (c.has("feasibility_threshold"))
    a.threshold = parse_double("feasibility_threshold", c.last("feasibility_threshold"));
  return a;
}

std::string bounds_json(const BoundsArgs& args, const adversary::BoundReport& r) {
  ordered_json j;
  j["tool"] = "countbench";
  j["version"] = kVersion;
  j["config"] = {{"n", args.n},         {"k", args.k},          {"eps", args.eps},
                 {"ell", args.ell},     {"ell_prime", args.ell_prime}, {"cprime", args.c_prime},
                 {"feasibility_threshold", args.threshold}};
  j["bounds"] = {{"copies", r.copies},
                 {"state_generation", r.state_generation},
                 {"reflection", r.reflection},
                 {"membership", r.membership},
                 {"fifth_threshold", r.fifth_threshold},
                 {"fifth_reflection", r.fifth_reflection}};
  j["weights"] = {{"T1", r.T1}, {"T2", r.T2}, {"T3", r.T3}};
  j["t"] = r.t;
  j["regime"] = {{"n_ge_5k", r.n_ge_5k}, {"eps_in_range", r.eps_in_range}, {"in_regime", r.in_regime}};
  if (r.feasibility) {
    const auto& f = *r.feasibility;
    j["feasibility"] = {{"t", f.t},
                        {"ell", f.ell},
                        {"gamma_norm", f.gamma_norm},
                        {"psi_lower_bound", f.psi_lower_bound},
                        {"inv_T1", f.inv_T1},
                        {"inv_T2", f.inv_T2},
                        {"inv_T3", f.inv_T3},
                        {"threshold", f.threshold},
                        {"psi_bound_ok", f.psi_bound_ok},
                        {"theorem_regime", f.theorem_regime},
                        {"t_within_k_over_5", f.t_within_k_over_5}};
  } else {
    j["feasibility"] = nullptr;
  }
  return j.dump(2) + "\n";
}

int cmd_bounds(const BoundsArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (!(args.eps > 0)) throw UsageError("eps must be positive");
    if (!(args.n >= 1) || !(args.k >= 1)) throw UsageError("n and k must be >= 1");
    const auto report = adversary::theorem_tradeoff(args.n, args.k, args.eps, args.ell, args.ell_prime,
                                                    adversary::TradeoffConstants{args.c_prime}, args.threshold);
    out << bounds_json(args, report);
    return kExitPass;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// --- simulate --------------------------------------------------------------

namespace {

simulate::ReflectionOracle oracle_from_name(const std::string& s) {
  if (s == "reflecting") return simulate::ReflectionOracle::Reflecting;
  if (s == "membership") return simulate::ReflectionOracle::Membership;
  if (s == "state-generating") return simulate::ReflectionOracle::StateGenerating;
  throw UsageError("oracle: expected reflecting, membership or state-generating, got '" + s + "'");
}

const char* oracle_name(simulate::ReflectionOracle o) {
  switch (o) {
    case simulate::ReflectionOracle::Reflecting: return "reflecting";
    case simulate::ReflectionOracle::Membership: return "membership";
    case simulate::ReflectionOracle::StateGenerating: return "state-generating";
  }
  return "?";
}

const char* hypothesis_name(simulate::Hypothesis h) { return h == simulate::Hypothesis::SizeK ? "k" : "k_prime"; }

}  // namespace

SimulateArgs simulate_from_config(const Config& c) {
  SimulateArgs a;
  if (c.has("procedure")) a.procedure = simulate::procedure_from_name(c.last("procedure"));
  auto& p = a.params;
  auto as_int = [&](const char* key) { return static_cast<int>(parse_int(key, c.last(key))); };
  if (c.has("n")) p.n = as_int("n");
  if (c.has("k")) p.k = as_int("k");
  if (c.has("eps")) p.eps = parse_double("eps", c.last("eps"));
  if (c.has("ell")) p.ell = as_int("ell");
  if (c.has("budget")) p.budget = as_int("budget");
  if (c.has("repeat")) p.repeat = as_int("repeat");
  if (c.has("retries")) p.stage_retries = as_int("retries");
  if (c.has("oracle")) p.oracle = oracle_from_name(c.last("oracle"));
  if (c.has("trials")) a.trials = parse_int("trials", c.last("trials"));
  if (c.has("jobs")) a.jobs = as_int("jobs");
  if (c.has("out")) a.out_dir = c.last("out");
  a.seed = resolve_seed(c);
  if (a.trials < 1) throw UsageError("trials must be >= 1");
  if (a.jobs < 1 || a.jobs > 1024) throw UsageError("jobs must be in 1..1024");
  if (p.budget < 0) throw UsageError("budget must be >= 0");
  if (a.procedure == simulate::Procedure::Subset && p.ell == 0) p.ell = std::max(1, p.k / 4);
  return a;
}

void write_trials_csv(std::ostream& os, const std::vector<simulate::CampaignTrial>& trials) {
  os << "trial,truth,decision,correct,failed,in_regime,copies,state_generation,reflections,membership\n";
  for (const auto& t : trials) {
    const auto& o = t.outcome;
    os << t.index << ',' << hypothesis_name(t.truth) << ',' << (o.failed ? "none" : hypothesis_name(o.decision))
       << ',' << o.correct << ',' << o.failed << ',' << o.in_regime << ',' << o.tally.copies << ','
       << o.tally.state_generation << ',' << o.tally.reflections << ',' << o.tally.membership << '\n';
  }
}

std::string simulate_json(const SimulateArgs& a, const simulate::CampaignSummary& s) {
  ordered_json j;
  j["tool"] = "countbench";
  j["version"] = kVersion;
  const auto& p = a.params;
  j["config"] = {{"procedure", simulate::procedure_name(a.procedure)},
                 {"n", p.n},
                 {"k", p.k},
                 {"eps", p.eps},
                 {"ell", p.ell},
                 {"budget", p.budget > 0 ? p.budget : simulate::default_budget(a.procedure, p)},
                 {"repeat", p.repeat},
                 {"retries", p.stage_retries},
                 {"oracle", oracle_name(p.oracle)},
                 {"trials", a.trials},
                 {"seed", a.seed},
                 {"jobs", a.jobs}};
  j["summary"] = {{"trials", s.trials},
                  {"success_rate", s.success_rate},
                  {"standard_error", s.standard_error},
                  {"success_rate_k", s.success_rate_k},
                  {"success_rate_k_prime", s.success_rate_k_prime},
                  {"failures", s.failures},
                  {"mean_copies", s.mean_copies},
                  {"mean_state_generation", s.mean_state_generation},
                  {"mean_reflections", s.mean_reflections},
                  {"mean_membership", s.mean_membership}};
  return j.dump(2) + "\n";
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.trials < 1) throw UsageError("trials must be >= 1");
    const auto trials = simulate::run_campaign(args.procedure, args.params, args.trials, args.seed, args.jobs);
    const auto summary = simulate::summarize(trials);
    if (args.out_dir.empty()) {
      out << simulate_json(args, summary);
    } else {
      const auto dir = prepare_dir(args.out_dir);
      std::ostringstream csv;
      write_trials_csv(csv, trials);
      write_file(dir / "trials.csv", csv.str());
      write_file(dir / "summary.json", simulate_json(args, summary));
    }
    return kExitPass;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace countbench::workbench
