#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "teichlab/errors.hpp"
#include "teichlab/ergodic.hpp"

using namespace teichlab;
using std::numbers::pi;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

Iet golden_iet() {
  Iet t;
  t.perm = Permutation::rotation_class(2);
  t.lengths = {kGolden, 1.0 - kGolden};
  return t;
}

// Special flow by fixed time steps: the quadrature oracle.
double brute_flow_integral(const Suspension& s, const std::vector<double>& c, SuspensionPoint p, double T,
                           double dt) {
  const ExchangeMap m(s.iet);
  double acc = 0.0;
  const auto steps = static_cast<long>(std::llround(T / dt));
  for (long k = 0; k < steps; ++k) {
    Label a = m.label_of_slot(m.slot(p.x));
    acc += c[static_cast<std::size_t>(a)] * dt;
    p.y += dt;
    while (p.y >= s.heights[static_cast<std::size_t>(a)]) {
      p.y -= s.heights[static_cast<std::size_t>(a)];
      p.x = m(p.x);
      a = m.label_of_slot(m.slot(p.x));
    }
  }
  return acc;
}

SuspensionPoint random_point(const Suspension& s, Rng& rng) {
  const ExchangeMap m(s.iet);
  const double x = uniform(rng, 0.0, m.total());
  return {x, uniform(rng, 0.0, s.heights[static_cast<std::size_t>(m.label_of_slot(m.slot(x)))])};
}

}  // namespace

TEST_CASE("suspension data") {
  Rng rng(1);
  const Suspension s = random_suspension(stratum_permutation("h2"), rng);
  CHECK(s.area() == doctest::Approx(1.0));
  CHECK(s.iet.total_length() == doctest::Approx(1.0));
  for (double h : s.heights) CHECK(h > 0.0);
  CHECK_THROWS_AS(make_suspension(s.iet, {1.0, -1.0, 1.0, 1.0}), ValidationError);

  const CohomObservable c = make_observable(s, {0.5, -1.0, 2.0, 0.25});
  double mean = 0.0;
  for (std::size_t a = 0; a < 4; ++a) mean += c.c[a] * s.iet.lengths[a] * s.heights[a];
  CHECK(c.mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(c.recomputed_mean(s) == doctest::Approx(c.mean).epsilon(1e-12));
  const auto w = crossing_vector(s, c);
  for (std::size_t a = 0; a < 4; ++a) CHECK(w[a] == doctest::Approx(c.c[a] * s.heights[a]));
  const CohomObservable back = observable_from_crossings(s, w);
  for (std::size_t a = 0; a < 4; ++a) CHECK(back.c[a] == doctest::Approx(c.c[a]));
}

TEST_CASE("birkhoff sums") {
  const Iet t = golden_iet();
  CHECK(birkhoff_sum(t, {1.0, 1.0}, 0.1234, 777) == 777.0);
  CHECK(birkhoff_sum(t, {1.0, 1.0}, 0.1234, 0) == 0.0);
  // Zero-mean indicator combination at Fibonacci times.
  const std::vector<double> c{1.0 - kGolden, -kGolden};
  Rng rng(2);
  std::uint64_t a = 1, b = 2;
  while (b < 100000) {
    for (int i = 0; i < 20; ++i) CHECK(std::abs(birkhoff_sum(t, c, uniform(rng, 0.0, 1.0), b)) <= 1.0 + 1e-9);
    const auto n = a + b;
    a = b;
    b = n;
  }
  CHECK_THROWS_AS(birkhoff_sum(t, c, kGolden, 5), BoundaryError);
}

TEST_CASE("flow integrals") {
  Rng rng(3);
  const Suspension s = random_suspension(stratum_permutation("h2"), rng);
  const SuspensionPoint p = random_point(s, rng);
  CHECK(flow_integral(s, make_observable(s, {1, 1, 1, 1}), p, 123.25) == doctest::Approx(123.25).epsilon(1e-12));

  // A full return from the base over letter a integrates c_a h_a.
  const ExchangeMap m(s.iet);
  const std::vector<double> cv{0.3, -0.7, 1.1, 0.2};
  const double x = 0.5 * (m.breaks()[1] + m.breaks()[2]);
  const Label a = m.label_of_slot(1);
  CHECK(flow_integral(s, make_observable(s, cv), {x, 0.0}, s.heights[static_cast<std::size_t>(a)]) ==
        doctest::Approx(cv[static_cast<std::size_t>(a)] * s.heights[static_cast<std::size_t>(a)]));

  for (int i = 0; i < 20; ++i) {
    const Suspension si = random_suspension(stratum_permutation(i % 2 ? "h2" : "h11"), rng);
    std::vector<double> c(si.size());
    for (double& v : c) v = uniform(rng, 0.0, 1.0);
    const SuspensionPoint q = random_point(si, rng);
    const double exact = flow_integral(si, make_observable(si, c), q, 1000.0);
    const double brute = brute_flow_integral(si, c, q, 1000.0, 1e-4);
    CHECK(exact == doctest::Approx(brute).epsilon(1e-3));
  }
}

TEST_CASE("trajectory splitting") {
  Rng rng(4);
  const Suspension s = random_suspension(stratum_permutation("h2"), rng);
  const ExchangeMap m(s.iet);
  const double x = 0.3 * m.breaks()[1];
  const double h = s.heights[static_cast<std::size_t>(m.label_of_slot(0))];
  const SplitDecomposition short_run = trajectory_split(s, {x, 0.0}, 0.5 * h);
  CHECK(short_run.pieces.empty());
  CHECK(short_run.remainder_length == doctest::Approx(0.5 * h));

  const ScaleLadder ladder = build_ladder(s, 1e4);
  for (int i = 0; i < 100; ++i) {
    const double T = std::exp(uniform(rng, 0.0, std::log(1e4)));
    const SplitDecomposition d = trajectory_split(ladder, s, random_point(s, rng), T);
    CHECK(std::abs(d.pieces_length() + d.remainder_length - T) <= 1e-9 * T);
    for (const SplitPiece& piece : d.pieces) CHECK(piece.start < ladder.lengths[piece.scale]);
  }
  CHECK_THROWS_AS(trajectory_split(ladder, s, {x, 0.0}, 1e9), ScaleExhausted);

  // Golden rotation: every renormalization rescales by the golden ratio, so
  // at most two principal returns of each scale fit between scales.
  const Suspension g = rotation_suspension(kGolden);
  for (int i = 0; i < 50; ++i) {
    const SplitDecomposition d = trajectory_split(g, random_point(g, rng), 100.0 * uniform(rng, 0.5, 1.0));
    for (auto mk : d.multiplicities) CHECK(mk <= 2);
    CHECK(d.multiplicity_ratio() <= 2.0);
  }

  const double kp = calibrate_kp(ladder, s, 1e4, rng, 200);
  for (int i = 0; i < 100; ++i) {
    const double T = std::exp(uniform(rng, 0.0, std::log(1e4)));
    CHECK(trajectory_split(ladder, s, random_point(s, rng), T, kp).bound_holds());
  }
}

TEST_CASE("first return bounds") {
  Rng rng(5);
  const ReturnBounds r = first_return_bounds(rotation_suspension(kGolden), rng);
  CHECK(r.lower == 1.0);
  CHECK(r.upper == 1.0);
  const Suspension s = random_suspension(stratum_permutation("h11"), rng);
  const ReturnBounds b = first_return_bounds(s, rng);
  CHECK(b.lower <= b.upper);
  CHECK(b.lower >= *std::min_element(s.heights.begin(), s.heights.end()));
  CHECK(b.upper <= *std::max_element(s.heights.begin(), s.heights.end()));
  CHECK(std::isfinite(b.upper));
}

TEST_CASE("deviation exponents") {
  // Genus one: bounded sums.
  const Suspension g = rotation_suspension(kGolden);
  const CohomObservable zero_mean = make_observable(g, {kGolden, -(1.0 - kGolden)});
  DeviationConfig cfg;
  const DeviationReport r = deviation_exponent(g, zero_mean, 0.0, cfg);
  CHECK(r.fitted_exponent <= 0.1);
  CHECK(r.log_T.back() - r.log_T.front() >= 2 * std::log(10.0));
  CHECK_THROWS_AS(deviation_exponent(g, make_observable(g, {1.0, 1.0}), 0.0, cfg), MeanError);

  const auto grid = geometric_grid(1000, 1.25);
  CHECK(grid.front() == 1);
  CHECK(grid.back() == 1000);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  std::vector<double> lx, ly;
  for (double t = 0; t < 10; t += 0.5) {
    lx.push_back(t);
    ly.push_back(0.4 * t + 1.0);
  }
  CHECK(envelope_slope(lx, ly, 2.0) == doctest::Approx(0.4));
}

TEST_CASE("obstructions and projection on H(2)") {
  const SplitSuspension ss = oseledec_suspension(stratum_permutation("h2"), 11);
  const Suspension& s = ss.suspension;
  const OseledecSplitting& sp = ss.splitting;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> w(sp.e_minus.col(j).data(), sp.e_minus.col(j).data() + 4);
    const Eigen::VectorXd coef = obstruction_coefficients(s, observable_from_crossings(s, w), sp);
    for (Eigen::Index i = 0; i < coef.size(); ++i) CHECK(coef(i) == doctest::Approx(i == 2 + j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
  }
  const Eigen::VectorXd z = obstruction_coefficients(s, make_observable(s, {0, 0, 0, 0}), sp);
  CHECK(z.norm() == 0.0);

  Rng rng(12);
  const CohomObservable c = generic_observable(s, rng);
  CHECK(std::abs(c.mean) < 1e-12);
  const CohomObservable proj = project_observable(s, c, sp);
  const CohomObservable stable = project_observable(s, c, sp, true);
  const Eigen::VectorXd pc = obstruction_coefficients(s, proj, sp);
  CHECK(std::abs(pc(1)) < 1e-9);  // the lambda_2 functional vanishes
  DeviationConfig cfg;
  cfg.n_max = 200'000;
  CHECK(deviation_exponent(s, proj, 0.0, cfg).fitted_exponent < 0.05);
  CHECK(deviation_exponent(s, stable, 0.0, cfg).fitted_exponent < 0.05);
}

TEST_CASE("double averages") {
  // Torus: f = S v for v = cos(2 pi y), vertical flow; closed form
  // u_T = (sin 2pi(y+T) - sin 2pi y) / (2 pi T) - cos 2pi y.
  torus::FourierFunction v;
  v.add_real_mode({0, 1}, {0.5, 0.0});
  const torus::FourierFunction f = torus::directional_derivative(v, pi / 2);
  for (double y : {0.1, 0.37, 0.8})
    for (double T : {1.3, 10.0, 100.0}) {
      const double exact = (std::sin(2 * pi * (y + T)) - std::sin(2 * pi * y)) / (2 * pi * T) - std::cos(2 * pi * y);
      // Trapezoid error is O(dt^2 |f''|).
      CHECK(gh_average(f, pi / 2, 0.2, y, T) == doctest::Approx(exact).epsilon(1e-5).scale(1.0));
      CHECK(gh_average(f, pi / 2, 0.2, y, T, 1e-4) == doctest::Approx(exact).epsilon(1e-7).scale(1.0));
    }
  CHECK(std::abs(-gh_average(f, pi / 2, 0.2, 0.3, 1000.0) - std::cos(2 * pi * 0.3)) < 0.05);
  CHECK(gh_average(torus::FourierFunction{}, 0.4, 0.1, 0.2, 50.0) == 0.0);
  torus::FourierFunction m;
  m.set({0, 0}, 1.0);
  CHECK_THROWS_AS(gh_average(m, 0.4, 0.1, 0.2, 5.0), MeanError);

  // Suspension: compare with a Simpson quadrature of tau -> flow integral.
  Rng rng(13);
  const Suspension s = random_suspension(stratum_permutation("h2"), rng);
  const CohomObservable c = generic_observable(s, rng);
  const SuspensionPoint p = random_point(s, rng);
  const std::vector<double> Ts{3.0, 17.0, 40.0};
  const auto series = gh_series(s, c, p, Ts);
  for (std::size_t k = 0; k < Ts.size(); ++k) {
    const int n = 40000;
    const double hstep = Ts[k] / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * flow_integral(s, c, p, i * hstep);
    }
    const double simpson = acc * hstep / 3.0 / Ts[k];
    CHECK(series[k] == doctest::Approx(simpson).epsilon(1e-6).scale(1.0));
    CHECK(gh_average(s, c, p, Ts[k]) == doctest::Approx(series[k]).epsilon(1e-12));
  }
}

TEST_CASE("deviation ensemble is reproducible and ordered") {
  DeviationConfig cfg;
  cfg.n_max = 20'000;
  const auto a = deviation_ensemble(stratum_permutation("h2"), 3, 5, cfg, 500);
  const auto b = deviation_ensemble(stratum_permutation("h2"), 3, 5, cfg, 500);
  CHECK(a.generic == b.generic);
  CHECK(a.projected == b.projected);
  CHECK(a.seeds == b.seeds);
  double mean = 0.0;
  for (double x : a.generic) mean += x / 3.0;
  CHECK(a.mean_generic == doctest::Approx(mean));
}
