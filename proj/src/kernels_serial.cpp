#include <cmath>
#include <numbers>

#include "teichlab/kernels.hpp"

namespace teichlab::kernels::serial {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::uint64_t weyl_count(double lambda) {
  if (!(lambda > 0.0)) return 0;
  const double r2 = lambda / (kTwoPi * kTwoPi);
  const auto r = static_cast<long>(std::floor(std::sqrt(r2))) + 1;
  std::uint64_t n = 0;
  for (long a = -r; a <= r; ++a)
    for (long b = -r; b <= r; ++b)
      if (kTwoPi * kTwoPi * static_cast<double>(a * a + b * b) <= lambda) ++n;
  return n;
}

double mode_sup_ratio(double theta, double eps, int nmax, double resonance_tol) {
  const double c = std::cos(theta), s = std::sin(theta);
  double best = 0.0;
  for (int a = -nmax; a <= nmax; ++a) {
    for (int b = -nmax; b <= nmax; ++b) {
      if (a == 0 && b == 0) continue;
      const double div = a * c + b * s;
      if (std::abs(div) <= resonance_tol) return INFINITY;
      const double lam = kTwoPi * kTwoPi * static_cast<double>(a * a + b * b);
      const double r = std::pow(1.0 + lam, -0.5 * (1.0 + eps)) / (kTwoPi * std::abs(div));
      if (r > best) best = r;
    }
  }
  return best;
}

std::vector<OrbitSums> orbit_sums(const ExchangeMap& map, std::span<const double> values,
                                  std::span<const double> starts,
                                  std::span<const std::uint64_t> sample_n) {
  std::vector<OrbitSums> out(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    OrbitSums& o = out[i];
    o.sup_abs.assign(sample_n.size(), 0.0);
    double x = starts[i], sum = 0.0, sup = 0.0;
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < sample_n.size(); ++k) {
      for (; m < sample_n[k]; ++m) {
        if (map.boundary_distance(x) <= 1e-14) o.boundary_hit = true;
        const std::size_t j = map.slot(x);
        sum += values[static_cast<std::size_t>(map.label_of_slot(j))];
        x = map.map_slot(x, j);
        sup = std::max(sup, std::abs(sum));
      }
      o.sup_abs[k] = sup;
    }
    o.final_sum = sum;
  }
  return out;
}

}  // namespace teichlab::kernels::serial
