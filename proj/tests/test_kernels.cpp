#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "teichlab/kernels.hpp"
#include "teichlab/spectral_torus.hpp"

using namespace teichlab;

TEST_CASE("weyl count: serial and parallel agree") {
  for (double l : {0.5, 39.5, 1e3, 2e3, 5e4, 1e5, 3.3e6})
    CHECK(kernels::serial::weyl_count(l) == kernels::omp::weyl_count(l));
}

TEST_CASE("mode ratio: serial and parallel agree bitwise") {
  const double g = torus::golden_theta();
  for (int n : {1, 7, 64, 256})
    for (double eps : {0.1, -0.5, 1.0}) {
      const double a = kernels::serial::mode_sup_ratio(g, eps, n, 1e-13);
      const double b = kernels::omp::mode_sup_ratio(g, eps, n, 1e-13);
      CHECK(a == b);
    }
  CHECK(std::isinf(kernels::serial::mode_sup_ratio(std::atan(0.5), 0.1, 4, 1e-13)));
  CHECK(std::isinf(kernels::omp::mode_sup_ratio(std::atan(0.5), 0.1, 4, 1e-13)));
}

TEST_CASE("orbit sums: serial and parallel agree bitwise") {
  Rng rng(17);
  const Iet t = random_iet(Permutation::rotation_class(5), rng);
  const ExchangeMap m(t);
  std::vector<double> values(5);
  for (double& v : values) v = uniform(rng, -1.0, 1.0);
  std::vector<double> starts(13);
  for (double& s : starts) s = uniform01(rng);
  const std::vector<std::uint64_t> n{1, 2, 10, 100, 1000, 20000};
  const auto a = kernels::serial::orbit_sums(m, values, starts, n);
  const auto b = kernels::omp::orbit_sums(m, values, starts, n);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sup_abs == b[i].sup_abs);
    CHECK(a[i].final_sum == b[i].final_sum);
    CHECK(a[i].boundary_hit == b[i].boundary_hit);
  }
  // Direct loop for the first start.
  double x = starts[0], s = 0.0, sup = 0.0;
  for (std::uint64_t k = 0; k < n.back(); ++k) {
    s += values[static_cast<std::size_t>(m.label_of_slot(m.slot(x)))];
    sup = std::max(sup, std::abs(s));
    x = m(x);
  }
  CHECK(a[0].final_sum == doctest::Approx(s).epsilon(1e-12));
  CHECK(a[0].sup_abs.back() == doctest::Approx(sup).epsilon(1e-12));
}

TEST_CASE("map_seeds keeps seed order and rethrows") {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 50; ++i) seeds.push_back(i * 7);
  auto f = [](std::uint64_t s) { return derive_seed(s, 3); };
  CHECK(kernels::omp::map_seeds<std::uint64_t>(seeds, f) == kernels::serial::map_seeds<std::uint64_t>(seeds, f));
  auto bad = [](std::uint64_t s) -> int {
    if (s == 21) throw std::runtime_error("boom");
    return 0;
  };
  CHECK_THROWS_AS(kernels::omp::map_seeds<int>(seeds, bad), std::runtime_error);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(derive_seed(9, 4) == derive_seed(9, 4));
  Rng rng(1);
  const auto p = uniform_simplex(rng, 6);
  double s = 0.0;
  for (double x : p) {
    CHECK(x > 0.0);
    s += x;
  }
  CHECK(s == doctest::Approx(1.0));
}
