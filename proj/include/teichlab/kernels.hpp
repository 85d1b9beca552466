#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; the two must
// agree bit for bit (reductions are order-independent: integer sums and
// maxima, or results written to per-index slots).

#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#include "teichlab/iet.hpp"

namespace teichlab::kernels {

// One orbit's running sup of |S_n| sampled at the given increasing n.
struct OrbitSums {
  std::vector<double> sup_abs;  // sup_{m <= n_k} |S_m|, one per sample
  double final_sum = 0.0;       // S_{n_max}
  bool boundary_hit = false;
};

namespace serial {

std::uint64_t weyl_count(double lambda);

// sup over modes 0 < |n|_inf <= nmax of
//   (1 + 4 pi^2 |n|^2)^{-(1+eps)/2} / (2 pi |n . w|),  w = (cos t, sin t).
// Returns +inf if some divisor is within `resonance_tol`.
double mode_sup_ratio(double theta, double eps, int nmax, double resonance_tol);

// Birkhoff sums of `values` (indexed by label) along the orbits of `starts`.
std::vector<OrbitSums> orbit_sums(const ExchangeMap& map, std::span<const double> values,
                                  std::span<const double> starts,
                                  std::span<const std::uint64_t> sample_n);

template <class Result, class Fn>
std::vector<Result> map_seeds(const std::vector<std::uint64_t>& seeds, Fn&& fn) {
  std::vector<Result> out;
  out.reserve(seeds.size());
  for (auto s : seeds) out.push_back(fn(s));
  return out;
}

}  // namespace serial

namespace omp {

std::uint64_t weyl_count(double lambda);
double mode_sup_ratio(double theta, double eps, int nmax, double resonance_tol);
std::vector<OrbitSums> orbit_sums(const ExchangeMap& map, std::span<const double> values,
                                  std::span<const double> starts,
                                  std::span<const std::uint64_t> sample_n);

// Runs fn(seed) for each seed concurrently, results kept in seed order.
template <class Result, class Fn>
std::vector<Result> map_seeds(const std::vector<std::uint64_t>& seeds, Fn&& fn) {
  std::vector<Result> out(seeds.size());
  const auto n = static_cast<long>(seeds.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(seeds[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace omp

}  // namespace teichlab::kernels
