#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "teichlab/errors.hpp"

namespace teichlab::torus {

struct GaussExpansion {
  std::vector<std::uint64_t> quotients;
  bool precision_exhausted = false;
};

// Partial quotients of x in (0, 1) by the Gauss map x -> 1/x - floor(1/x),
// with a running bound on the absolute error of the iterate. Stops at `depth`
// or when the error bound no longer pins the next quotient; throws
// RationalError when the iterate reaches 0 while still resolved below
// `resolution`.
template <class T>
GaussExpansion gauss_expansion(T x, int depth, T unit_roundoff, T resolution) {
  using std::floor;
  GaussExpansion out;
  T err = x * unit_roundoff;
  if (!(x > T(0)) || !(x < T(1))) throw RationalError("slope fractional part must lie in (0, 1)");
  for (int k = 0; k < depth; ++k) {
    const T inv = T(1) / x;
    const T a = floor(inv);
    const T y = inv - a;
    const T err_y = err / (x * x) * T(1.5) + inv * unit_roundoff * T(2);
    if (y <= err_y || T(1) - y <= err_y) {
      if (err_y <= resolution) throw RationalError("Gauss map hit 0 within resolution (rational slope)");
      out.precision_exhausted = true;
      break;
    }
    out.quotients.push_back(static_cast<std::uint64_t>(a));
    x = y;
    err = err_y;
    if (err > T(0.25)) {
      out.precision_exhausted = true;
      break;
    }
  }
  return out;
}

}  // namespace teichlab::torus
