// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qsync/cli.hpp"
#include "qsync/dynamics_map.hpp"
#include "qsync/quasimode.hpp"
#include "qsync/sweep.hpp"
#include "qsync/sync_measure.hpp"

using namespace qsync;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SweepSpec tongue_spec(double omega, double delta_drive) {
  SweepSpec s;
  s.x = {SweepParam::delta_spec, -6.0, 2.0, 161};
  s.y = {SweepParam::gamma0, 0.1, 2.0, 96};
  s.drive = {omega, delta_drive};
  s.spectrum = {1.0, 0.1, 0.0};
  s.t_eval = 100.0;
  return s;
}

Outcome identity_channel() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rho = oracle::random_state(rng);
    const auto p = oracle::random_params(rng);
    const auto out = evolve(rho, {p.omega_rabi, p.delta_drive}, {1.0, p.lambda, p.delta_spec}, 0.0);
    worst = std::max({worst, std::abs(out.rho_gg() - rho.rho_gg()), std::abs(out.rho_ge() - rho.rho_ge())});
  }
  return {worst <= 1e-12, fmt("max deviation %.3g over 100 states (tol 1e-12)", worst)};
}

Outcome oracle_triangle() {
  std::mt19937_64 rng(202);
  const auto grid = uniform_grid(100.0, 10000);
  double worst_pm = 0.0, worst_vol = 0.0;
  for (int k = 0; k < 25; ++k) {
    const auto p = oracle::random_params(rng);
    const DriveParams d{p.omega_rabi, p.delta_drive};
    const SpectrumParams s{1.0, p.lambda, p.delta_spec};
    const auto pm = q_pseudomode(d, s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst_pm = std::max(worst_pm, std::abs(pm.values[i] - q_closed_form(d, s, grid[i])));
    const auto vol = q_volterra(d, s, 100.0, 1e-4);
    for (std::size_t i = 0; i < vol.size(); ++i)
      worst_vol = std::max(worst_vol, std::abs(vol.values[i] - q_closed_form(d, s, vol.times[i])));
  }
  return {worst_pm <= 1e-7 && worst_vol <= 1e-6,
          fmt("25 sets: pseudomode %.3g (tol 1e-7), volterra h=1e-4 %.3g (tol 1e-6)", worst_pm,
              worst_vol)};
}

Outcome markovian_decay() {
  double worst = 0.0;
  for (int i = 0; i <= 5000; ++i) {
    const double t = 5.0 * i / 5000.0;
    worst = std::max(worst, std::abs(std::abs(q_closed_form({0, 0}, {1.0, 100.0, 0.0}, t)) - std::exp(-0.5 * t)));
  }
  return {worst <= 0.02, fmt("sup_t<=5 ||q| - e^{-t/2}| = %.4g (tol 0.02)", worst)};
}

Outcome anti_phase_anchor() {
  const auto plus = DensityMatrix::plus_state();
  const double driven = s_measure(evolve(plus, {1.0, 0.0}, {1.0, 10.0, 0.0}, 100.0), 0.0);
  const double undriven = s_measure(evolve(plus, {0.0, 0.0}, {1.0, 10.0, 0.0}, 100.0), 0.0);
  return {std::abs(driven + 0.125) <= 0.005 && std::abs(undriven) <= 1e-3,
          fmt("S(0,100) = %.6f at Omega=1 (want -0.125 +- 0.005), %.3g at Omega=0 (want |S| <= 1e-3)",
              driven, undriven)};
}

Outcome driving_enhanced_locking() {
  const auto plus = DensityMatrix::plus_state();
  const SpectrumParams s{1.0, 0.1, 0.0};
  std::vector<double> mins;
  for (double omega : {0.0, 0.5, 1.0, 2.0}) {
    const DriveParams d{omega, 0.0};
    double lo = INFINITY;
    for (int i = 0; i <= 8000; ++i)
      lo = std::min(lo, s_measure(evolve(plus, d, s, 20.0 + 80.0 * i / 8000.0), 0.0));
    mins.push_back(lo);
  }
  bool increasing = true;
  for (std::size_t i = 1; i < mins.size(); ++i) increasing = increasing && mins[i] > mins[i - 1];
  return {increasing && mins[2] > 0.02,
          fmt("min_{t in [20,100]} S(0,t) for Omega 0, 0.5, 1, 2: %.4f %.4f %.4f %.4f", mins[0], mins[1],
              mins[2], mins[3])};
}

Outcome tongue_centres() {
  bool ok = true;
  std::string detail;
  for (auto [omega, delta] : {std::pair{0.5, 0.0}, std::pair{1.0, 0.0}, std::pair{1.0, 2.0}}) {
    const auto s = tongue_spec(omega, delta);
    const double got = tongue_center(s, 1);
    const double want = delta - std::sqrt(delta * delta + 4 * omega * omega);
    ok = ok && std::abs(got - want) <= s.x.cell_width();
    detail += fmt("(O=%g,D=%g) %.4f vs %.4f; ", omega, delta, got, want);
  }
  return {ok, detail + "tol one cell = 0.05"};
}

Outcome hollowed_structure() {
  const auto g = run_sweep(tongue_spec(1.0, 0.0), 1);
  int slices = 0, hollowed = 0;
  for (const auto& s : analyze_hollowing(g, 0.01, 0.01)) {
    if (s.y < 0.3 - 1e-12) continue;
    ++slices;
    hollowed += s.hollowed;
  }
  const double frac = static_cast<double>(hollowed) / slices;
  return {frac >= 0.8, fmt("%d of %d slices hollowed (%.1f%%, need >= 80%%)", hollowed, slices, 100 * frac)};
}

Outcome physicality() {
  std::mt19937_64 rng(808);
  double worst = INFINITY;
  bool all_cp = true;
  for (int k = 0; k < 20; ++k) {
    const auto p = oracle::random_params(rng);
    for (int i = 0; i < 50; ++i) {
      const double t = std::pow(10.0, -2.0 + 4.0 * i / 49.0);
      const auto r = choi_check({p.omega_rabi, p.delta_drive}, {1.0, p.lambda, p.delta_spec}, t);
      all_cp = all_cp && r.is_cp;
      worst = std::min(worst, r.min_eigenvalue);
    }
  }
  return {all_cp, fmt("1000 checks, t in [1e-2, 1e2]; smallest Choi eigenvalue %.3g", worst)};
}

Outcome determinism() {
  const auto spec = tongue_spec(1.0, 0.0);
  std::ostringstream one, eight;
  cli::write_sweep_csv(one, run_sweep(spec, 1));
  cli::write_sweep_csv(eight, run_sweep(spec, 8));
  const bool same = one.str() == eight.str();
  return {same, fmt("%zu bytes, workers 1 vs 8 %s", one.str().size(), same ? "identical" : "DIFFER")};
}

Outcome max_s_identity() {
  std::mt19937_64 rng(1010);
  double worst_refined = 0.0, worst_bare = 0.0, worst_excess = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rho = oracle::random_state(rng);
    const auto s = [&](double p) { return s_measure(rho, p); };
    const double target = std::abs(rho.rho_ge()) / 4.0;
    const double bare = oracle::scan_max(s, 10000);
    worst_bare = std::max(worst_bare, std::abs(bare - target));
    worst_excess = std::max(worst_excess, bare - target);
    worst_refined = std::max(worst_refined, std::abs(oracle::scan_max_refined(s, 10000) - target));
    worst_refined = std::max(worst_refined, std::abs(max_s(rho).s_of_phi - target));
  }
  return {worst_refined <= 1e-9 && worst_excess <= 1e-15,
          fmt("refined 1e4-sample scan %.3g (tol 1e-9); bare uniform scan undershoot %.3g "
              "(sampling bound 6.2e-9)",
              worst_refined, worst_bare)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "identity channel", 1.0, identity_channel},
      {2, "oracle triangle", 30.0, oracle_triangle},
      {3, "Markovian decay", 1.0, markovian_decay},
      {4, "anti-phase anchor", 1.0, anti_phase_anchor},
      {5, "driving-enhanced locking", 5.0, driving_enhanced_locking},
      {6, "tongue centre", 180.0, tongue_centres},
      {7, "hollowed structure", 60.0, hollowed_structure},
      {8, "physicality sweep", 5.0, physicality},
      {9, "determinism", 120.0, determinism},
      {10, "max-S identity", 1.0, max_s_identity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r{false, ""};
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = r.ok && in_time;
    failures += !pass;
    std::printf("%s  %2d %-26s %8.3f s (budget %g s)%s  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_s, in_time ? "" : " OVER BUDGET", r.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
