#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qsync/dynamics_map.hpp"
#include "qsync/sync_measure.hpp"

using namespace qsync;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

const DensityMatrix kPlus = DensityMatrix::plus_state();
const DensityMatrix kMixed = DensityMatrix::maximally_mixed();

DensityMatrix markov_stationary() {
  return evolve(kPlus, {1.0, 0.0}, {1.0, 10.0, 0.0}, 100.0);
}

}  // namespace

TEST_CASE("husimi_q examples", "[sync]") {
  CHECK(husimi_q(kPlus, pi / 2, 0.0) == Approx(1.0 / (2 * pi)).epsilon(1e-14));
  CHECK(husimi_q(kPlus, pi / 2, 0.0) == Approx(0.15915).margin(1e-5));
  CHECK(husimi_q(kPlus, pi / 2, pi) == Approx(0.0).margin(1e-16));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> th(0.0, pi), ph(-pi, pi);
  for (int i = 0; i < 100; ++i)
    CHECK(husimi_q(kMixed, th(rng), ph(rng)) == Approx(1.0 / (4 * pi)).epsilon(1e-14));
}

TEST_CASE("coherent-state overlap oracle", "[sync][oracle]") {
  // |theta, phi> = cos(theta/2)|e> + sin(theta/2) e^{i phi}|g>, lab index 0 = g
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> th(0.0, pi), ph(-pi, pi);
  for (int i = 0; i < 200; ++i) {
    const auto rho = oracle::random_state(rng);
    const double t = th(rng), p = ph(rng);
    Eigen::Vector2cd v(std::sin(t / 2) * std::polar(1.0, p), std::cos(t / 2));
    const double expect = (v.adjoint() * oracle::to_matrix(rho) * v)(0, 0).real() / (2 * pi);
    CHECK(husimi_q(rho, t, p) == Approx(expect).margin(1e-15));
    CHECK(husimi_q(rho, t, p) >= -1e-15);
  }
}

TEST_CASE("s_measure examples", "[sync]") {
  CHECK(s_measure(kPlus, 0.0) == 0.125);
  for (double phi : {-3.0, -1.0, 0.0, 0.5, 2.0}) CHECK(s_measure(kMixed, phi) == 0.0);
  CHECK(s_measure(markov_stationary(), 0.0) == Approx(-0.125).margin(1e-10));
  for (double eta : {0.2, 0.8, 1.3}) {
    const auto stat = evolve_with_q(kPlus, {eta, 1.0}, 0.0);
    CHECK(s_measure(stat, 0.0) == Approx(-std::sin(eta) / 8).margin(1e-14));
  }
}

TEST_CASE("S(phi) equals the theta marginal of Q minus the uniform part", "[sync][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ph(-pi, pi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rho = oracle::random_state(rng);
    const double phi = ph(rng);
    const double integral = oracle::simpson(
        [&](double t) { return std::sin(t) * husimi_q(rho, t, phi); }, 0.0, pi, 2000);
    worst = std::max(worst, std::abs(integral - 1.0 / (2 * pi) - s_measure(rho, phi)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("max_s", "[sync]") {
  SECTION("examples") {
    const auto plus = max_s(kPlus);
    CHECK(plus.s_of_phi == 0.125);
    CHECK(plus.phi == 0.0);
    CHECK_FALSE(plus.degenerate);

    const auto mixed = max_s(kMixed);
    CHECK(mixed.s_of_phi == 0.0);
    CHECK(mixed.phi == 0.0);
    CHECK(mixed.degenerate);

    const auto stat = max_s(markov_stationary());
    CHECK(stat.s_of_phi == Approx(0.125).margin(1e-10));
    CHECK(std::abs(stat.phi) == Approx(pi).margin(1e-9));
  }
  SECTION("agrees with a brute-force phase scan") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
      const auto rho = oracle::random_state(rng);
      const auto m = max_s(rho);
      const auto s = [&](double p) { return s_measure(rho, p); };
      const double coarse = oracle::scan_max(s, 10000);
      const double scan = oracle::scan_max_refined(s, 10000);
      CHECK(m.s_of_phi >= coarse - 1e-15);
      CHECK(m.s_of_phi >= scan - 1e-15);
      CHECK(m.s_of_phi - scan <= 1e-9);
      CHECK(s_measure(rho, m.phi) == Approx(m.s_of_phi).margin(1e-15));
      CHECK(m.phi >= -pi);
      CHECK(m.phi <= pi);
      CHECK(m.s_of_phi <= 0.125 + 1e-15);
    }
  }
}

TEST_CASE("sign dichotomy at phi = 0", "[sync][property]") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto rho = oracle::random_state(rng);
    const double s0 = s_measure(rho, 0.0), re = rho.rho_ge().real();
    CHECK((s0 > 0) == (re > 0));
    CHECK((s0 < 0) == (re < 0));
  }
}

TEST_CASE("husimi_grid", "[sync]") {
  SECTION("shape, default size and nonnegativity") {
    const auto g = husimi_grid(kPlus);
    CHECK(g.thetas.size() == 181);
    CHECK(g.phis.size() == 361);
    CHECK(g.values.size() == 181 * 361);
    CHECK(g.thetas.front() == 0.0);
    CHECK(g.thetas.back() == pi);
    CHECK(g.phis.front() == -pi);
    CHECK(g.phis.back() == pi);
    CHECK(g.at(90, 180) == Approx(1.0 / (2 * pi)));
    for (double v : g.values) CHECK(v >= 0.0);
  }
  SECTION("normalization on a 200 x 200 lattice") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 20; ++i) {
      const auto g = husimi_grid(oracle::random_state(rng), 200, 200);
      const double dth = pi / 199, dph = 2 * pi / 199;
      std::vector<double> marginal(200);
      for (std::size_t a = 0; a < 200; ++a) {
        double row = 0.0;  // periodic trapezoid: drop the duplicated end point
        for (std::size_t b = 0; b + 1 < 200; ++b) row += g.at(a, b);
        marginal[a] = std::sin(g.thetas[a]) * row * dph;
      }
      CHECK(oracle::simpson(marginal, dth) == Approx(1.0).margin(1e-6));
    }
  }
  SECTION("rejects degenerate lattices") {
    CHECK_THROWS_AS(husimi_grid(kPlus, 1, 10), std::invalid_argument);
    CHECK_THROWS_AS(husimi_grid(kPlus, 10, 0), std::invalid_argument);
  }
}
