#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "teichlab/kernels.hpp"

namespace teichlab::kernels::omp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::uint64_t weyl_count(double lambda) {
  if (!(lambda > 0.0)) return 0;
  const double r2 = lambda / (kTwoPi * kTwoPi);
  const auto r = static_cast<long>(std::floor(std::sqrt(r2))) + 1;
  std::uint64_t n = 0;
#pragma omp parallel for reduction(+ : n) schedule(static)
  for (long a = -r; a <= r; ++a)
    for (long b = -r; b <= r; ++b)
      if (kTwoPi * kTwoPi * static_cast<double>(a * a + b * b) <= lambda) ++n;
  return n;
}

double mode_sup_ratio(double theta, double eps, int nmax, double resonance_tol) {
  const double c = std::cos(theta), s = std::sin(theta);
  double best = 0.0;
  bool resonant = false;
#pragma omp parallel for reduction(max : best) reduction(|| : resonant) schedule(static)
  for (int a = -nmax; a <= nmax; ++a) {
    for (int b = -nmax; b <= nmax; ++b) {
      if (a == 0 && b == 0) continue;
      const double div = a * c + b * s;
      if (std::abs(div) <= resonance_tol) {
        resonant = true;
        continue;
      }
      const double lam = kTwoPi * kTwoPi * static_cast<double>(a * a + b * b);
      const double r = std::pow(1.0 + lam, -0.5 * (1.0 + eps)) / (kTwoPi * std::abs(div));
      best = std::max(best, r);
    }
  }
  return resonant ? INFINITY : best;
}

std::vector<OrbitSums> orbit_sums(const ExchangeMap& map, std::span<const double> values,
                                  std::span<const double> starts,
                                  std::span<const std::uint64_t> sample_n) {
  std::vector<OrbitSums> out(starts.size());
  const auto n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    // Each orbit is the serial kernel on a one-element span.
    out[static_cast<std::size_t>(i)] =
        serial::orbit_sums(map, values, starts.subspan(static_cast<std::size_t>(i), 1), sample_n).front();
  }
  return out;
}

}  // namespace teichlab::kernels::omp
