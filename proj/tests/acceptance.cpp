// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "countbench/adversary.hpp"
#include "countbench/bruteforce.hpp"
#include "countbench/johnson.hpp"
#include "countbench/simulate.hpp"
#include "countbench/workbench.hpp"

using namespace countbench;
namespace fs = std::filesystem;
using bruteforce::CheckId;
using linalg::MatrixXd;
using linalg::VectorXd;

namespace {

constexpr std::array<std::array<int, 3>, 8> kSweep{{
    {6, 1, 2}, {7, 1, 2}, {8, 2, 3}, {9, 2, 3}, {10, 2, 3}, {10, 3, 4}, {12, 2, 4}, {12, 3, 4}}};

int failures = 0;
std::map<int, std::string> lines;

void report(int id, bool pass, const std::string& detail) {
  lines[id] = std::string(pass ? "PASS" : "FAIL") + "  " + detail;
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Criteria 1, 4, 5 and 6 share the brute-force contexts.
void sweep_criteria() {
  bool c1 = true, c4 = true, c5 = true, c6 = true;
  double worst1 = 0, margin5 = 1e300, worst6 = 0;
  int rows = 0;
  std::string first_fail;
  const auto t0 = std::chrono::steady_clock::now();
  double c5_seconds = 0;
  for (const auto& [n, k, kp] : kSweep) {
    const bruteforce::InstanceContext ctx(adversary::ProblemInstance::make(n, k, kp));

    for (bool hat : {false, true}) {
      const auto& fam = ctx.family(hat);
      for (int j = 0; j <= fam.k; ++j) {
        const auto expected = johnson::binomial(n, j) - johnson::binomial(n, j - 1);
        if (fam.rank(j) != expected) c4 = false;
      }
    }

    for (int t = 1; t <= 3; ++t)
      for (CheckId id : bruteforce::kAllChecks) {
        const int ell = id == CheckId::PSI_POWER ? std::min(1, t / 2) : 1;
        const auto r = bruteforce::verify(id, ctx, t, ell);
        ++rows;
        worst1 = std::max(worst1, r.discrepancy / r.tolerance);
        if (!r.pass) {
          c1 = false;
          if (first_fail.empty())
            first_fail = std::string(bruteforce::check_name(id)) + " at (" + std::to_string(n) + "," +
                         std::to_string(k) + "," + std::to_string(kp) + ") t=" + std::to_string(t);
        }
        if (id == CheckId::DELTA_MEMB) {
          worst6 = std::max(worst6, r.spread);
          if (!(r.spread <= 1e-10)) c6 = false;
        }
      }

    const auto t5 = std::chrono::steady_clock::now();
    for (int ell = 1; ell <= 3; ++ell) {
      const auto r = bruteforce::verify(CheckId::PSI_POWER, ctx, 2 * ell, ell);
      // r.closed_form is D^l / 2; the brute force must not fall below it.
      const double margin = r.brute_force - r.closed_form;
      margin5 = std::min(margin5, margin);
      if (!(margin >= -1e-9)) c5 = false;
    }
    c5_seconds += seconds_since(t5);
  }
  const double elapsed = seconds_since(t0) - c5_seconds;
  report(1, c1, std::to_string(rows) + " rows, worst discrepancy/tolerance " + fmt("%.3g", worst1) + ", " +
                    fmt("%.1f s", elapsed) + (first_fail.empty() ? "" : ", first failure " + first_fail));
  report(4, c4, "projector traces round to C(n,j)-C(n,j-1) at both levels");
  report(5, c5, fmt("min(brute force - D^l/2) = %.4g over l = 1..3, t = 2l", margin5));
  report(6, c6, fmt("max spread of per-element membership norms %.3g", worst6));
}

void criterion2() {
  double worst = 0;
  for (const auto& [n, k, kp] : kSweep) {
    const auto phis = adversary::phi_table(adversary::ProblemInstance::make(n, k, kp));
    for (const auto& v : phis.phi) worst = std::max(worst, std::abs(v.norm() - 1));
    for (const auto& v : phis.phi_prime) worst = std::max(worst, std::abs(v.norm() - 1));
  }
  report(2, worst <= 1e-12, fmt("max |norm(phi_j) - 1| = %.3g", worst));
}

void criterion3() {
  double orth = 0, entry = 0;
  for (const auto& [n, k, kp] : kSweep)
    for (int level : {k, kp})
      for (int j = 0; j <= level; ++j) {
        const auto [t1, t2] = johnson::basis_change_tables(n, level, j);
        const auto r = johnson::reference_vectors(n, level, j);
        orth = std::max(orth, (t1.transpose() * t1 - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff());
        // Vectors that vanish at j = level have no table entries to compare.
        const VectorXd zero = VectorXd::Zero(r.v.size());
        const VectorXd& vt = r.v_tilde ? *r.v_tilde : zero;
        const VectorXd& wb = r.w_bullet ? *r.w_bullet : zero;
        const std::array<const VectorXd*, 2> w1{&r.w_circ, &wb}, v1{&r.v, &vt};
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            if (w1[a]->norm() > 0 && v1[b]->norm() > 0)
              entry = std::max(entry, std::abs(t1(a, b) - w1[a]->dot(*v1[b])));
        if (!r.has_two_fixed) continue;
        orth = std::max(orth, (t2.transpose() * t2 - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff());
        const VectorXd& vp = r.v_plus ? *r.v_plus : zero;
        const VectorXd& wcd = r.w_cd ? *r.w_cd : zero;
        const std::array<const VectorXd*, 4> w2{&r.w_empty, &r.w_c, &r.w_d, &wcd},
            v2{&r.v_minus, &r.v, &r.v_zero, &vp};
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            if (w2[a]->norm() > 0 && v2[b]->norm() > 0)
              entry = std::max(entry, std::abs(t2(a, b) - w2[a]->dot(*v2[b])));
      }
  report(3, orth <= 1e-12 && entry <= 1e-10, fmt("orthogonality defect %.3g, entry mismatch %.3g", orth, entry));
}

void criterion7() {
  bool ok = true;
  std::string detail;
  auto expect = [&](const char* what, double got, double want) {
    if (std::abs(got - want) > 1e-9 * std::max(1.0, std::abs(want))) {
      ok = false;
      detail += std::string(what) + fmt(" got %.12g want %.12g; ", got, want);
    }
  };
  const auto a = adversary::theorem_tradeoff(1e6, 1e4, 0.1, 0, 0);
  expect("membership", a.membership, 100);
  expect("copies", a.copies, 1000);  // min{k, sqrt(k)/eps, n/(k eps^2)} = min{1e4, 1e3, 1e4}
  expect("state_generation", a.state_generation, std::min(std::cbrt(1e4) / std::pow(0.1, 2.0 / 3), std::sqrt(1e6 / 1e4) / 0.1));
  expect("reflection", a.reflection, 100);

  // Three hand-computed cases.
  const auto b = adversary::theorem_tradeoff(1e6, 1e4, 1, 0, 0);
  expect("eps=1 copies", b.copies, 100);
  expect("eps=1 membership", b.membership, 10);
  const auto c = adversary::theorem_tradeoff(1e6, 1e4, 0.01, 0, 0);
  expect("eps=0.01 state_generation", c.state_generation, 100 * std::cbrt(100.0));
  expect("eps=0.01 membership", c.membership, 1000);
  expect("eps=0.01 t", c.t, 20);
  const auto d = adversary::theorem_tradeoff(1e8, 1e4, 0.1, 400, 0);
  expect("l=400 state_generation", d.state_generation, 50);
  expect("l=400 reflection", d.reflection, 50);
  expect("l=400 t", d.t, 800);

  // The bounds report carries the same numbers.
  workbench::BoundsArgs args;
  args.n = 1e6;
  args.k = 1e4;
  args.eps = 0.1;
  std::ostringstream out, err;
  const int code = workbench::cmd_bounds(args, out, err);
  if (code != 0 || out.str().find("\"membership\": 100.0") == std::string::npos) {
    ok = false;
    detail += "bounds report mismatch; ";
  }
  report(7, ok, detail.empty() ? "membership 100, copies 1000 and three hand cases match" : detail);
}

void criterion8() {
  using namespace simulate;
  struct Case {
    const char* name;
    Procedure p;
    SimulationParams q;
  };
  std::vector<Case> cases;
  auto params = [](int n, int k, double eps, int ell) {
    SimulationParams q;
    q.n = n;
    q.k = k;
    q.eps = eps;
    q.ell = ell;
    return q;
  };
  cases.push_back({"coupon", Procedure::Coupon, params(1024, 32, 1, 0)});
  cases.push_back({"collision", Procedure::Collision, params(1024, 256, 0.5, 0)});
  cases.push_back({"overlap", Procedure::Overlap, params(1024, 64, 1, 0)});
  cases.push_back({"qcount", Procedure::QCount, params(1024, 16, 1, 0)});
  cases.push_back({"subset", Procedure::Subset, params(4096, 64, 0.5, 16)});
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 2024;
  for (const auto& c : cases) {
    const auto s = summarize(run_campaign(c.p, c.q, 1000, seed++, 1));
    const bool pass = s.success_rate >= 2.0 / 3 - 3 * s.standard_error;
    ok = ok && pass;
    detail += std::string(c.name) + fmt(" %.3f, ", s.success_rate);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120;
  report(8, ok, detail + fmt("%.1f s", secs));
}

void criterion9() {
  using namespace simulate;
  std::vector<double> ns, qc;
  for (int n : {1024, 2048, 4096, 8192}) {
    ns.push_back(n);
    qc.push_back(double(quantum_counting(n, 16, 1, Hypothesis::SizeK, 1).tally.reflections));
  }
  std::vector<double> ells, ks;
  for (int ell : {2, 4, 8, 16}) {
    ells.push_back(ell);
    ks.push_back(double(known_subset_counting(4096, 64, 0.5, ell, Hypothesis::SizeK, 1).tally.reflections));
  }
  const double a = loglog_slope(ns, qc), b = loglog_slope(ells, ks);
  report(9, std::abs(a - 0.5) <= 0.08 && std::abs(b + 0.5) <= 0.08,
         fmt("slope vs n %.3f, slope vs l %.3f", a, b));
}

void criterion10() {
  double worst = 0;
  for (int n = 2; n <= 64; ++n)
    for (int m = 1; m < n; ++m) {
      auto g = simulate::grover_state(n, std::sqrt(static_cast<double>(m) / n));
      const auto full = simulate::full_statevector_marked_probabilities(n, m, 50);
      for (int j = 0; j <= 50; ++j) {
        worst = std::max(worst, std::abs(g.marked_probability() - full[static_cast<std::size_t>(j)]));
        g.iterate();
      }
    }
  report(10, worst <= 1e-12, fmt("max deviation %.3g", worst));
}

void criterion11() {
  const fs::path root = fs::temp_directory_path() / ("countbench_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const std::string cli = COUNTBENCH_CLI_PATH;
  bool ok = true;
  std::string detail;
  auto run = [&](const std::string& args, const fs::path& out) {
    const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out.string() + "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string verify_args = "verify --instance 8,2,3 --instance 7,1,2 --t 1 --t 2 --seed 5";
  const std::string sim_args = "simulate --procedure qcount --n 1024 --k 16 --eps 1 --trials 300 --seed 9 --jobs 4";
  for (int rep = 0; rep < 2; ++rep) {
    if (run(verify_args, root / ("verify" + std::to_string(rep))) != 0) ok = false;
    if (run(sim_args, root / ("sim" + std::to_string(rep))) != 0) ok = false;
  }
  if (!ok) detail = "a CLI run exited nonzero; ";
  for (const char* f : {"verify.csv", "verify.json"})
    if (slurp(root / "verify0" / f) != slurp(root / "verify1" / f) || slurp(root / "verify0" / f).empty()) {
      ok = false;
      detail += std::string(f) + " differs; ";
    }
  for (const char* f : {"trials.csv", "summary.json"})
    if (slurp(root / "sim0" / f) != slurp(root / "sim1" / f) || slurp(root / "sim0" / f).empty()) {
      ok = false;
      detail += std::string(f) + " differs; ";
    }

  // In-process: the same entry point twice, and trial records across thread counts.
  workbench::SimulateArgs s;
  s.procedure = simulate::Procedure::Bootstrap;
  s.params.n = 4096;
  s.params.k = 64;
  s.params.eps = 0.25;
  s.trials = 200;
  s.seed = 3;
  std::ostringstream a, b, e;
  workbench::cmd_simulate(s, a, e);
  workbench::cmd_simulate(s, b, e);
  if (a.str() != b.str()) {
    ok = false;
    detail += "in-process simulate differs between runs; ";
  }
  std::ostringstream one, many;
  workbench::write_trials_csv(one, simulate::run_campaign(s.procedure, s.params, s.trials, s.seed, 1));
  workbench::write_trials_csv(many, simulate::run_campaign(s.procedure, s.params, s.trials, s.seed, 3));
  if (one.str() != many.str()) {
    ok = false;
    detail += "trial records depend on the thread count; ";
  }
  fs::remove_all(root);
  report(11, ok, detail.empty() ? "verify and simulate outputs byte-identical across runs" : detail);
}

}  // namespace

int main() {
  std::printf("countbench acceptance\n");
  sweep_criteria();
  criterion2();
  criterion3();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  for (const auto& [id, line] : lines) std::printf("criterion %2d: %s\n", id, line.c_str());
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
