#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "teichlab/errors.hpp"
#include "teichlab/iet.hpp"

using namespace teichlab;

namespace {

Iet make(const Permutation& p, std::vector<double> lengths) {
  Iet t;
  t.perm = p;
  t.lengths = std::move(lengths);
  return t;
}

Permutation two() { return Permutation::rotation_class(2); }

// Subtractive Euclid on (a, b) until the larger side changes.
std::uint64_t euclid_run(long double a, long double b) {
  std::uint64_t n = 0;
  if (a > b) {
    while (a > b) { a -= b; ++n; }
  } else {
    while (b > a) { b -= a; ++n; }
  }
  return n;
}

// Independent matrix product for the bookkeeping oracle.
std::vector<long double> mat_vec(const VisitationMatrix& m, const std::vector<double>& v) {
  std::vector<long double> out(m.size(), 0.0L);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out[i] += static_cast<long double>(m(i, j)) * v[j];
  return out;
}

}  // namespace

TEST_CASE("permutation validation and irreducibility") {
  CHECK_THROWS_AS(Permutation({0, 1}, {0, 0}), ValidationError);
  CHECK_THROWS_AS(Permutation({0}, {0}), ValidationError);
  CHECK(Permutation::rotation_class(4).is_irreducible());
  CHECK_FALSE(Permutation({0, 1, 2}, {0, 2, 1}).is_irreducible());
  const Permutation p = Permutation::from_names({"A", "B", "C"}, {"C", "A", "B"});
  CHECK(p.top() == std::vector<Label>{0, 1, 2});
  CHECK(p.bottom() == std::vector<Label>{2, 0, 1});
}

TEST_CASE("rauzy step on two letters is a subtraction") {
  const auto [next, step] = rauzy_step(make(two(), {0.6180, 0.3820}));
  CHECK(next.lengths[0] == doctest::Approx(0.2360).epsilon(1e-12));
  CHECK(next.lengths[1] == doctest::Approx(0.3820).epsilon(1e-12));
  CHECK(next.perm == two());
  CHECK(step.kind == RauzyKind::Bottom);
  CHECK(step.winner == 0);
  CHECK(step.loser == 1);
}

TEST_CASE("rauzy step on four letters matches the hand-executed move") {
  // Bottom wins: lambda_A = 0.4 - 0.1 and D moves right after A on top.
  const auto [next, step] = rauzy_step(make(Permutation::rotation_class(4), {0.4, 0.3, 0.2, 0.1}));
  CHECK(step.kind == RauzyKind::Bottom);
  CHECK(next.perm.top() == std::vector<Label>{0, 3, 1, 2});
  CHECK(next.perm.bottom() == std::vector<Label>{3, 2, 1, 0});
  CHECK(next.lengths[0] == doctest::Approx(0.3));
  CHECK(next.lengths[3] == doctest::Approx(0.1));
}

TEST_CASE("ties and reducible input are rejected") {
  CHECK_THROWS_AS(rauzy_step(make(two(), {0.5, 0.5})), TieError);
  CHECK_THROWS_AS(rauzy_step(make(Permutation({0, 1, 2}, {0, 2, 1}), {0.3, 0.3, 0.4})), ReducibleError);
}

TEST_CASE("zorich runs follow the continued fraction") {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  Iet t = make(two(), {g, 1.0 - g});
  for (int k = 0; k < 20; ++k) {
    const ZorichStep z = zorich_step(t);
    CHECK(z.count == 1);
    t = z.iet;
  }
  // (0.75, 0.25) is an exact tie after three subtractions; perturb both ways.
  CHECK(zorich_step(make(two(), {0.76, 0.24})).count == 3);
  CHECK(zorich_step(make(two(), {0.74, 0.26})).count == 2);
  CHECK(euclid_run(0.76L, 0.24L) == 3);

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double a = uniform(rng, 0.05, 0.95);
    const ZorichStep z = zorich_step(make(two(), {a, 1.0 - a}));
    CHECK(z.count == euclid_run(a, 1.0 - a));
  }
}

TEST_CASE("visitation matrices are unimodular and book-keep lengths") {
  Rng rng(11);
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    Iet t = random_iet(Permutation::rotation_class(d), rng);
    const std::vector<double> start = t.lengths;
    VisitationMatrix total(d);
    double scale = 1.0;
    for (int k = 0; k < 30; ++k) {
      const ZorichStep z = zorich_step(t);
      CHECK(z.matrix.determinant() == 1);
      total = total * z.matrix;
      scale *= std::exp(-z.log_factor);
      t = z.iet;
    }
    std::vector<double> unnorm = t.lengths;
    for (double& x : unnorm) x *= scale;
    const auto back = mat_vec(total, unnorm);
    for (std::size_t i = 0; i < d; ++i)
      CHECK(static_cast<double>(back[i]) == doctest::Approx(start[i]).epsilon(1e-9));
  }
}

TEST_CASE("zorich step equals the fold of rauzy steps") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 3);
    const Iet t = random_iet(Permutation::rotation_class(d), rng);
    const ZorichStep z = zorich_step(t);

    Iet cur = t;
    VisitationMatrix prod(d);
    std::uint64_t count = 0;
    const RauzyKind kind = rauzy_kind(cur);
    while (count == 0 || rauzy_kind(cur) == kind) {
      auto [next, step] = rauzy_step(cur);
      prod = prod * step.elementary_matrix;
      cur = next;
      ++count;
    }
    CHECK(count == z.count);
    CHECK(prod == z.matrix);
    CHECK(cur.perm == z.iet.perm);
    const double total = cur.total_length();
    for (std::size_t i = 0; i < d; ++i) CHECK(cur.lengths[i] / total == doctest::Approx(z.iet.lengths[i]).epsilon(1e-9));
  }
}

TEST_CASE("apply translates intervals") {
  const Iet t = make(two(), {0.618, 0.382});
  CHECK(apply(t, 0.1) == doctest::Approx(0.482));
  CHECK(apply(t, 0.9) == doctest::Approx(0.282));
  CHECK_THROWS_AS(apply(t, 0.618), BoundaryError);
  CHECK(letter_at(t, 0.7) == 1);
}

TEST_CASE("apply is a.e. bijective") {
  Rng rng(3);
  const Iet t = random_iet(Permutation::rotation_class(5), rng);
  const ExchangeMap m(t);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = uniform01(rng);
    if (m.boundary_distance(x) < 1e-13) continue;
    const double y = apply(t, x);
    CHECK(y >= 0.0);
    CHECK(y < 1.0);
    worst = std::max(worst, std::abs(apply_inverse(t, y) - x));
    CHECK(m(x) == apply(t, x));
  }
  CHECK(worst < 1e-12);

  // Image intervals tile [0, 1): translated domain pieces in bottom order.
  const auto tr = t.translations();
  const auto br = t.domain_breaks();
  double edge = 0.0;
  for (Label a : t.perm.bottom()) {
    const double left = br[static_cast<std::size_t>(t.perm.top_position(a))] + tr[static_cast<std::size_t>(a)];
    CHECK(left == doctest::Approx(edge).epsilon(1e-12));
    edge = left + t.lengths[static_cast<std::size_t>(a)];
  }
  CHECK(edge == doctest::Approx(1.0));
}

TEST_CASE("keane condition") {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  CHECK(keane_check(make(two(), {g, 1.0 - g}), 10000));
  CHECK_FALSE(keane_check(make(two(), {0.75, 0.25}), 8));
  Rng rng(42);
  CHECK(keane_check(random_iet(Permutation::rotation_class(4), rng), 10000));
}

TEST_CASE("near-rational data diverges against a small cap") {
  IetConfig cfg;
  cfg.zorich_cap = 1000;
  CHECK_THROWS_AS(zorich_step(make(two(), {1.0 - 1e-6, 1e-6}), cfg), DivergenceError);
}
