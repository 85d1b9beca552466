// End-to-end acceptance: one PASS/FAIL line per criterion. Each experiment is
// the same RunConfig the README's CLI invocation produces.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>

#include "teichlab/cocycle.hpp"
#include "teichlab/errors.hpp"
#include "teichlab/ergodic.hpp"
#include "teichlab/run.hpp"
#include "teichlab/spectral_torus.hpp"
#include "teichlab/surface.hpp"

using namespace teichlab;
using nlohmann::ordered_json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ordered_json payload(const std::string& command, std::map<std::string, std::string> params, std::uint64_t seed = 1,
                     std::vector<std::string> positional = {}) {
  RunConfig c;
  c.command = command;
  c.params = std::move(params);
  c.seed = seed;
  c.positional = std::move(positional);
  return run(c).payload;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double lambda2_h2 = std::nan("");

// ------------------------------------------------------------------ 1

Outcome top_exponent() {
  const auto p = payload("lyapunov", {{"stratum", "h2"}, {"steps", "1e6"}});
  const double l1 = p["lambdas"][0];
  const double stab = p["raw_top_stability"];
  const bool sym = p["checks"]["symmetry"];
  std::string sums;
  for (const auto& s : p["pair_sums"]) sums += fmt("%+.2e ", s.get<double>());
  return {l1 == 1.0 && stab < 0.01 && sym,
          "lambda1=" + fmt("%.17g", l1) + " raw stability=" + fmt("%.2e", stab) + " pair sums=" + sums};
}

// ------------------------------------------------------------------ 2

Outcome gap_and_hyperbolicity() {
  bool ok = true;
  std::string detail;
  for (const auto& [stratum, target, tol] :
       std::vector<std::tuple<std::string, double, double>>{{"h2", 0.333, 0.01}, {"h11", 0.5, 0.015}}) {
    const auto pooled = payload("lyapunov", {{"stratum", stratum}, {"steps", "1e6"}});
    const bool gap = pooled["checks"]["gap"], hyp = pooled["checks"]["hyperbolic"];
    ok = ok && gap && hyp;
    const double l2 = pooled["lambdas"][1];
    if (stratum == "h2") lambda2_h2 = l2;
    detail += stratum + ": lambda2=" + fmt("%.4f", l2) + fmt("+-%.4f", pooled["stderr"][1].get<double>()) +
              (gap ? " gap" : " NO-GAP") + (hyp ? " hyperbolic" : " NOT-HYPERBOLIC") + " seeds=";
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto single = payload("lyapunov", {{"stratum", stratum}, {"steps", "1e6"}, {"seeds", "1"}}, seed * 1000);
      const double v = single["lambdas"][1];
      ok = ok && std::abs(v - target) <= tol;
      detail += fmt("%.4f ", v);
    }
    detail += "; ";
  }
  return {ok, detail};
}

// ------------------------------------------------------------------ 3

Outcome loss_of_regularity() {
  const auto a = payload("loss", {{"theta", "golden"}, {"eps", "0.1"}, {"s", "2"}, {"nmax", "256"}});
  const auto b = payload("loss", {{"theta", "golden"}, {"eps", "-0.5"}, {"s", "2"}, {"nmax", "256"}});
  const double ra = a["final_over_first"], rb = b["final_over_first"];
  return {ra < 1.5 && rb >= 1.5,
          "eps=0.1 final/first=" + fmt("%.4f", ra) + "; eps=-0.5 final/first=" + fmt("%.4f", rb)};
}

// ------------------------------------------------------------------ 4

Outcome interpolation_parseval() {
  Rng rng(derive_seed(1, 4));
  int violations = 0, parseval_fail = 0, cases = 0;
  double worst_gap = -1e300;
  for (int i = 0; i < 100; ++i) {
    torus::FourierFunction f;
    const int modes = 1 + static_cast<int>(rng() % 20);
    for (int k = 0; k < modes; ++k) {
      const int a = static_cast<int>(rng() % 25) - 12, b = static_cast<int>(rng() % 25) - 12;
      f.add_real_mode({a, b}, {uniform(rng, -1, 1), uniform(rng, -1, 1)});
    }
    double l2 = 0.0;
    for (const auto& [n, c] : f.coeffs()) l2 += std::norm(c);
    // Mean of |f|^2 on a 32 x 32 grid (exact for |n_i| <= 12).
    double quad = 0.0;
    for (int x = 0; x < 32; ++x)
      for (int y = 0; y < 32; ++y) quad += std::norm(f(x / 32.0, y / 32.0));
    quad /= 1024.0;
    const double n0 = torus::friedrichs_norm(f, 0.0);
    if (std::abs(n0 * n0 - l2) > 1e-14 * l2 || std::abs(quad - l2) > 1e-12 * l2) ++parseval_fail;
    for (double r : {0.0, 0.5, 1.0})
      for (double s : {1.5, 2.0, 3.0})
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
          const auto ic = torus::interpolation_check(f, r, s, t);
          ++cases;
          worst_gap = std::max(worst_gap, (ic.lhs - ic.rhs) / ic.rhs);
          if (ic.lhs > ic.rhs * (1 + 1e-13)) ++violations;
        }
  }
  return {violations == 0 && parseval_fail == 0,
          std::to_string(cases) + " interpolation cases, " + std::to_string(violations) +
              " violations (max (lhs-rhs)/rhs=" + fmt("%.1e", worst_gap) + "), Parseval failures " +
              std::to_string(parseval_fail)};
}

// ------------------------------------------------------------------ 5

Outcome weyl_linearity() {
  const auto p = payload("weyl", {{"range", "1e3:1e5"}});
  const double dev = p["max_relative_deviation"];
  // Exact lattice-count oracle at each grid point.
  bool oracle = true;
  RunConfig c;
  c.command = "weyl";
  c.params = {{"range", "1e3:1e5"}};
  for (const auto& row : run(c).csv_rows) {
    const double l = row[0];
    const int r = static_cast<int>(std::sqrt(l) / (2 * std::numbers::pi)) + 1;
    std::uint64_t n = 0;
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b)
        if (4 * std::numbers::pi * std::numbers::pi * (a * a + b * b) <= l) ++n;
    oracle = oracle && (n == static_cast<std::uint64_t>(row[1]));
  }
  // Diagnostic only: pointwise deviation on a dense log grid.
  const auto dense = payload("weyl", {{"range", "1e3:1e5"}, {"points", "2001"}});
  return {dev < 0.02 && oracle, "1-2-5 grid max |N/L*4pi - 1|=" + fmt("%.4f", dev) +
                                    (oracle ? ", oracle exact" : ", ORACLE MISMATCH") +
                                    "; dense-grid diagnostic " + fmt("%.4f", dense["max_relative_deviation"].get<double>())};
}

// ------------------------------------------------------------------ 6

Outcome splitting() {
  const auto p = payload("split", {{"surface", "h2"}, {"samples", "100"}, {"tmax", "1e4"}});
  const double book = p["worst_bookkeeping"];
  const bool bounds = p["bounds_hold"];
  return {book <= 1e-9 && bounds, "worst bookkeeping=" + fmt("%.2e", book) + " K_P=" + fmt("%.3f", p["kp"].get<double>()) +
                                      " worst ratio=" + fmt("%.3f", p["worst_multiplicity_ratio"].get<double>())};
}

// ------------------------------------------------------------------ 7

Outcome deviation_spectrum() {
  if (std::isnan(lambda2_h2)) lambda2_h2 = payload("lyapunov", {{"stratum", "h2"}, {"steps", "1e6"}})["lambdas"][1];
  const auto p = payload("deviation", {{"surface", "h2"},
                                       {"n", "1e6"},
                                       {"ensemble", "24"},
                                       {"lambda-ref", fmt("%.17g", lambda2_h2)}});
  const double mg = p["mean_generic"], mp = p["mean_projected"];
  const double resid = std::abs(mg - lambda2_h2), drop = mg - mp;
  return {resid <= 0.1 && drop >= 0.1, "mean generic=" + fmt("%.4f", mg) + " (lambda2=" + fmt("%.4f", lambda2_h2) +
                                           ", residual " + fmt("%.4f", resid) + "), mean projected=" + fmt("%.4f", mp) +
                                           ", drop " + fmt("%.4f", drop)};
}

// ------------------------------------------------------------------ 8

Outcome gottschalk_hedlund() {
  const auto t = payload("gh-bound", {{"surface", "torus"}, {"tmax", "1e3"}});
  const auto g = payload("gh-bound", {{"surface", "h2"}, {"observable", "stable"}, {"tmax", "1e6"}});
  const double err = t["terminal_error"], slope = g["birkhoff_slope"];
  return {err < 0.05 && slope < 0.05, "(a) torus terminal error=" + fmt("%.2e", err) + "; (b) stable running-sup slope=" +
                                          fmt("%.4f", slope) + ", gh sup=" + fmt("%.3f", g["gh_sup"].get<double>())};
}

// ------------------------------------------------------------------ 9

std::vector<long long> omega_ll(const Permutation& p) {
  const OmegaForm om = omega(p);
  return {om.matrix.begin(), om.matrix.end()};
}

Outcome property_suites() {
  int sym_fail = 0, sym_checks = 0;
  Rng rng(derive_seed(1, 9));
  for (int seed = 0; seed < 100; ++seed) {
    const std::size_t d = 2 + static_cast<std::size_t>(seed % 3);
    Iet t = random_iet(Permutation::rotation_class(d), rng);
    for (int k = 0; k < 10; ++k) {
      const ZorichStep z = zorich_step(t);
      const auto om = omega_ll(t.perm), on = omega_ll(z.iet.perm);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          long long s = 0;
          for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
              s += static_cast<long long>(z.matrix(a, i)) * om[a * d + b] * static_cast<long long>(z.matrix(b, j));
          if (s != on[i * d + j]) ++sym_fail;
        }
      if (z.matrix.determinant() != 1) ++sym_fail;
      ++sym_checks;
      t = z.iet;
    }
  }

  double round_trip = 0.0;
  const Iet t5 = random_iet(Permutation::rotation_class(5), rng);
  const ExchangeMap m5(t5);
  for (int i = 0; i < 100000; ++i) {
    const double x = uniform01(rng);
    if (m5.boundary_distance(x) < 1e-13) continue;
    round_trip = std::max(round_trip, std::abs(apply_inverse(t5, apply(t5, x)) - x));
  }

  double glue = 0.0, additivity = 0.0;
  int flows = 0;
  const std::vector<TranslationSurface> surfs{build_catalog(CatalogSurface::Torus), build_catalog(CatalogSurface::Octagon),
                                              build_catalog(CatalogSurface::LShape), build_catalog(CatalogSurface::H11Model)};
  for (int i = 0; i < 1000; ++i) {
    const TranslationSurface& s = surfs[static_cast<std::size_t>(i) % 4];
    const Polygon& p = s.polygon(0);
    // Rejection sample an interior point (the L-shape is not convex).
    Vec2 lo = p.vertices[0], hi = p.vertices[0];
    for (const Vec2& v : p.vertices) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    FlowPoint q{0, {}};
    for (bool inside = false; !inside;) {
      q.position = {uniform(rng, lo.x, hi.x), uniform(rng, lo.y, hi.y)};
      inside = true;
      for (std::size_t e = 0; e < p.size(); ++e)
        if (p.edge(e).cross(q.position - p.vertices[e]) <= 1e-6) inside = false;
    }
    const double th = uniform(rng, 0.0, 2 * std::numbers::pi), t1 = uniform(rng, 0, 5), t2 = uniform(rng, 0, 5);
    try {
      const Trajectory whole = flow(s, q, th, t1 + t2);
      const Trajectory rest = flow(s, flow(s, q, th, t1).end_point(), th, t2);
      additivity = std::max(additivity, (whole.end_point().position - rest.end_point().position).norm());
      for (std::size_t k = 0; k + 1 < whole.segments.size(); ++k)
        glue = std::max(glue, (whole.segments[k].end + whole.crossings[k].translation - whole.segments[k + 1].start).norm());
      ++flows;
    } catch (const SingularityHit&) {
    }
  }

  bool deterministic = true;
  for (const auto& [cmd, params] : std::vector<std::pair<std::string, std::map<std::string, std::string>>>{
           {"lyapunov", {{"steps", "1e4"}}}, {"split", {{"samples", "10"}}}, {"deviation", {{"n", "1e4"}, {"lambda-ref", "0.333"}}},
           {"gh-bound", {{"tmax", "1e4"}}}, {"solve-torus", {}}, {"loss", {{"nmax", "64"}}}}) {
    deterministic = deterministic && payload(cmd, params, 5).dump() == payload(cmd, params, 5).dump();
  }

  const bool ok = sym_fail == 0 && round_trip < 1e-12 && glue < 1e-12 && additivity < 1e-8 && flows > 990 && deterministic;
  return {ok, std::to_string(sym_checks) + " Zorich matrices symplectic/unimodular (" + std::to_string(sym_fail) +
                  " failures); IET round trip " + fmt("%.1e", round_trip) + "; gluing " + fmt("%.1e", glue) +
                  ", additivity " + fmt("%.1e", additivity) + " over " + std::to_string(flows) + " flows; envelopes " +
                  (deterministic ? "deterministic" : "NOT deterministic")};
}

}  // namespace

// Optional arguments select criteria by number, e.g. `acceptance 4 9`.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<std::tuple<int, const char*, double, std::function<Outcome()>>> criteria{
      {1, "top exponent and symmetry", 60, top_exponent},
      {2, "spectral gap and KZ-hyperbolicity", 120, gap_and_hyperbolicity},
      {3, "loss of regularity 1+eps", 10, loss_of_regularity},
      {4, "interpolation and Parseval", 5, interpolation_parseval},
      {5, "Weyl linearity", 5, weyl_linearity},
      {6, "trajectory-splitting bookkeeping", 30, splitting},
      {7, "deviation spectrum", 300, deviation_spectrum},
      {8, "Gottschalk-Hedlund boundedness", 180, gottschalk_hedlund},
      {9, "property suites", 120, property_suites},
  };
  int failed = 0, ran = 0;
  for (const auto& [id, name, budget, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s [%.1fs / %.0fs] %s\n", id, o.pass ? "PASS" : "FAIL", name, secs, budget,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
