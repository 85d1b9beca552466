#include "teichlab/spectral_torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "teichlab/continued_fraction.hpp"
#include "teichlab/errors.hpp"
#include "teichlab/kernels.hpp"

namespace teichlab::torus {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_frequency(Frequency n) {
  if (std::abs(n.first) > kMaxFrequency || std::abs(n.second) > kMaxFrequency) {
    throw ValidationError("frequency beyond |n_i| <= 256");
  }
}
}  // namespace

void FourierFunction::set(Frequency n, Complex c) {
  check_frequency(n);
  if (c == Complex(0.0, 0.0)) {
    coeffs_.erase(n);
    return;
  }
  coeffs_[n] = c;
}

void FourierFunction::add_real_mode(Frequency n, Complex c) {
  const Frequency m{-n.first, -n.second};
  if (n == m) {
    set(n, coeff(n) + Complex(c.real(), 0.0));
  } else {
    set(n, coeff(n) + c);
    set(m, coeff(m) + std::conj(c));
  }
  reality_ = true;
}

Complex FourierFunction::coeff(Frequency n) const {
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? Complex(0.0, 0.0) : it->second;
}

int FourierFunction::max_frequency() const noexcept {
  int m = 0;
  for (const auto& [n, c] : coeffs_) m = std::max({m, std::abs(n.first), std::abs(n.second)});
  return m;
}

bool FourierFunction::is_conjugate_symmetric(double tol) const {
  for (const auto& [n, c] : coeffs_) {
    if (std::abs(coeff({-n.first, -n.second}) - std::conj(c)) > tol) return false;
  }
  return true;
}

Complex FourierFunction::operator()(double x, double y) const {
  Complex acc(0.0, 0.0);
  for (const auto& [n, c] : coeffs_) {
    const double phase = kTwoPi * (n.first * x + n.second * y);
    acc += c * Complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

double eigenvalue(Frequency n) {
  return kTwoPi * kTwoPi * static_cast<double>(n.first * n.first + n.second * n.second);
}

double friedrichs_norm(const FourierFunction& f, double s) {
  double acc = 0.0;
  for (const auto& [n, c] : f.coeffs()) acc += std::pow(1.0 + eigenvalue(n), s) * std::norm(c);
  return std::sqrt(acc);
}

double weighted_norm(const FourierFunction& f, double s) {
  if (!(s >= 0.0)) throw ValidationError("weighted norm needs s >= 0");
  const int k = static_cast<int>(std::floor(s));
  const double frac = s - k;
  double acc = 0.0;
  for (const auto& [n, c] : f.coeffs()) {
    // S^i T^j e_n = (2 pi i n1)^i (2 pi i n2)^j e_n; the frame commutes on
    // the torus so both orderings contribute the same term.
    const double a2 = kTwoPi * kTwoPi * n.first * n.first;
    const double b2 = kTwoPi * kTwoPi * n.second * n.second;
    double word_sum = 0.0;
    double ai = 1.0;
    for (int i = 0; i <= k; ++i) {
      double bj = 1.0;
      for (int j = 0; i + j <= k; ++j) {
        word_sum += ai * bj;
        bj *= b2;
      }
      ai *= a2;
    }
    acc += std::pow(1.0 + eigenvalue(n), frac) * word_sum * std::norm(c);
  }
  return std::sqrt(acc);
}

InterpolationPair interpolation_check(const FourierFunction& f, double r, double s, double t) {
  if (!(0.0 <= r && r < s)) throw ValidationError("interpolation needs 0 <= r < s");
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("interpolation weight must lie in [0, 1]");
  const double lhs = friedrichs_norm(f, (1.0 - t) * r + t * s);
  const double rhs = std::pow(friedrichs_norm(f, r), 1.0 - t) * std::pow(friedrichs_norm(f, s), t);
  return {lhs, rhs};
}

std::uint64_t weyl_count(double lambda) { return kernels::omp::weyl_count(lambda); }

FourierFunction truncate(const FourierFunction& f, double tau) {
  FourierFunction out;
  out.set_reality_flag(f.reality_flag());
  for (const auto& [n, c] : f.coeffs())
    if (tau * tau * eigenvalue(n) <= 1.0) out.set(n, c);
  return out;
}

FourierFunction directional_derivative(const FourierFunction& u, double theta) {
  FourierFunction out;
  out.set_reality_flag(u.reality_flag());
  const double c = std::cos(theta), s = std::sin(theta);
  for (const auto& [n, v] : u.coeffs()) out.set(n, Complex(0.0, kTwoPi * (n.first * c + n.second * s)) * v);
  return out;
}

FourierFunction small_divisor_solve(const FourierFunction& f, double theta) {
  if (std::abs(f.coeff({0, 0})) != 0.0) {
    throw MeanError("f has nonzero mean; the constant mode is the invariant distribution");
  }
  const double c = std::cos(theta), s = std::sin(theta);
  FourierFunction u;
  u.set_reality_flag(f.reality_flag());
  for (const auto& [n, v] : f.coeffs()) {
    const double div = n.first * c + n.second * s;
    if (std::abs(div) <= kResonanceTolerance) {
      throw ResonanceError("vanishing divisor at mode (" + std::to_string(n.first) + ", " +
                           std::to_string(n.second) + ")");
    }
    u.set(n, v / Complex(0.0, kTwoPi * div));
  }
  return u;
}

double loss_of_regularity(double theta, double s, int nmax, double eps) {
  if (nmax < 1 || nmax > kMaxFrequency) throw ValidationError("nmax must lie in [1, 256]");
  if (!(s > 1.0 + eps)) throw ValidationError("loss probe needs s > 1 + eps");
  // For single modes the norm ratio does not depend on s.
  const double r = kernels::omp::mode_sup_ratio(theta, eps, nmax, kResonanceTolerance);
  if (std::isinf(r)) throw ResonanceError("vanishing divisor inside the frequency box");
  return r;
}

std::vector<double> loss_series(double theta, double s, const std::vector<int>& nmax, double eps) {
  std::vector<double> out;
  for (int n : nmax) out.push_back(loss_of_regularity(theta, s, n, eps));
  return out;
}

// ------------------------------------------------------- direction arithmetic

long double evaluate_continued_fraction(const std::vector<std::uint64_t>& q) {
  long double x = 0.0L;
  for (auto it = q.rbegin(); it != q.rend(); ++it) x = 1.0L / (static_cast<long double>(*it) + x);
  return x;
}

double golden_theta() { return std::atan((std::sqrt(5.0) - 1.0) / 2.0); }

DirectionArithmetic slope_arithmetic(long double slope, int depth, std::uint64_t bounded_threshold) {
  if (depth < 1 || depth > 60) throw ValidationError("depth must lie in [1, 60]");
  DirectionArithmetic da;
  slope = std::fabs(slope);
  if (slope > 1.0L) slope = 1.0L / slope;
  da.slope = slope;
  if (slope <= 1e-15L || slope >= 1.0L - 1e-15L) throw RationalError("slope is rational within resolution");
  const auto exp = gauss_expansion<long double>(slope, depth, std::numeric_limits<long double>::epsilon(), 1e-15L);
  da.partial_quotients = exp.quotients;

  // q_{-1} = 0, q_0 = 1, q_k = a_k q_{k-1} + q_{k-2}.
  long double qm2 = 0.0L, qm1 = 1.0L;
  for (auto a : da.partial_quotients) {
    const long double q = static_cast<long double>(a) * qm1 + qm2;
    da.denominators.push_back(q);
    qm2 = qm1;
    qm1 = q;
  }
  std::uint64_t amax = 0;
  for (auto a : da.partial_quotients) amax = std::max(amax, a);
  da.type_flags.bounded_type = !da.partial_quotients.empty() && amax <= bounded_threshold;

  // Least-squares slope of log q_{k+1} against log q_k over q_k > 1.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k + 1 < da.denominators.size(); ++k) {
    if (da.denominators[k] <= 1.0L) continue;
    const double x = std::log(static_cast<double>(da.denominators[k]));
    const double y = std::log(static_cast<double>(da.denominators[k + 1]));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    const double den = m * sxx - sx * sx;
    da.type_flags.roth_estimate = den > 0 ? (m * sxy - sx * sy) / den : 1.0;
  }
  return da;
}

DirectionArithmetic direction_arithmetic(double theta, int depth, std::uint64_t bounded_threshold) {
  const long double th = theta;
  const long double c = std::cos(th), s = std::sin(th);
  if (std::fabs(c) <= 1e-15L || std::fabs(s) <= 1e-15L) throw RationalError("axis direction");
  auto da = slope_arithmetic(std::fabs(s) <= std::fabs(c) ? s / c : c / s, depth, bounded_threshold);
  da.theta = theta;
  return da;
}

}  // namespace teichlab::torus
