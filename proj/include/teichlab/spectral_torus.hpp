#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace teichlab::torus {

using Complex = std::complex<double>;
using Frequency = std::pair<int, int>;

inline constexpr int kMaxFrequency = 256;

// Finite Fourier series on the unit square torus, sum_n c_n exp(2 pi i n.x).
// Frequencies are limited to |n_i| <= kMaxFrequency.
class FourierFunction {
 public:
  FourierFunction() = default;

  void set(Frequency n, Complex c);
  // Adds c e_n and, for real functions, conj(c) e_{-n}.
  void add_real_mode(Frequency n, Complex c);
  Complex coeff(Frequency n) const;
  const std::map<Frequency, Complex>& coeffs() const noexcept { return coeffs_; }
  std::size_t support_size() const noexcept { return coeffs_.size(); }
  int max_frequency() const noexcept;

  bool reality_flag() const noexcept { return reality_; }
  void set_reality_flag(bool r) noexcept { reality_ = r; }
  // Conjugate symmetry within tol.
  bool is_conjugate_symmetric(double tol = 1e-12) const;

  Complex operator()(double x, double y) const;
  double real_value(double x, double y) const { return (*this)(x, y).real(); }

 private:
  std::map<Frequency, Complex> coeffs_;
  bool reality_ = false;
};

// Dirichlet-form eigenvalue of e_n: 4 pi^2 |n|^2.
double eigenvalue(Frequency n);

// (sum_n (1 + lambda_n)^s |f_n|^2)^{1/2}.
double friedrichs_norm(const FourierFunction& f, double s);

// Fractional weighted norm built from the commuting frame S = d/dx, T = d/dy
// and the Friedrichs product of order {s}. Requires s >= 0.
double weighted_norm(const FourierFunction& f, double s);

struct InterpolationPair {
  double lhs;
  double rhs;
};

// lhs = ||f||_{(1-t) r + t s}, rhs = ||f||_r^{1-t} ||f||_s^t (Friedrichs).
InterpolationPair interpolation_check(const FourierFunction& f, double r, double s, double t);

// #{n in Z^2 : 4 pi^2 |n|^2 <= lambda}.
std::uint64_t weyl_count(double lambda);

// Keeps exactly the modes with tau^2 lambda_n <= 1.
FourierFunction truncate(const FourierFunction& f, double tau);

// S_theta u for S_theta = cos(theta) d/dx + sin(theta) d/dy.
FourierFunction directional_derivative(const FourierFunction& u, double theta);

inline constexpr double kResonanceTolerance = 1e-13;

// Solves S_theta u = f mode by mode. Throws MeanError if f_0 != 0 and
// ResonanceError if |n . (cos, sin)| <= 1e-13 for a supported mode.
FourierFunction small_divisor_solve(const FourierFunction& f, double theta);

// sup over 0 < |n|_inf <= nmax of ||u_n||_{s-1-eps} / ||e_n||_s where
// S_theta u_n = e_n. Throws ResonanceError on a vanishing divisor.
double loss_of_regularity(double theta, double s, int nmax, double eps);

// The same on a ladder of frequency caps.
std::vector<double> loss_series(double theta, double s, const std::vector<int>& nmax, double eps);

struct TypeFlags {
  bool bounded_type = false;
  double roth_estimate = 0.0;  // fitted exponent mu in q_{k+1} ~ q_k^mu
};

struct DirectionArithmetic {
  double theta = 0.0;
  long double slope = 0.0;  // |tan| or |cot|, whichever is at most 1
  std::vector<std::uint64_t> partial_quotients;  // [a_1, a_2, ...] of slope in (0, 1)
  std::vector<long double> denominators;         // q_1, q_2, ...
  TypeFlags type_flags;
};

// Continued fraction via the Gauss map; stops at `depth` quotients or as soon
// as the next quotient is no longer determined by the working precision.
// Throws RationalError when the map hits 0 within resolution.
DirectionArithmetic direction_arithmetic(double theta, int depth = 60, std::uint64_t bounded_threshold = 32);
DirectionArithmetic slope_arithmetic(long double slope, int depth = 60, std::uint64_t bounded_threshold = 32);

// Value of [0; a_1, a_2, ...].
long double evaluate_continued_fraction(const std::vector<std::uint64_t>& quotients);

// Direction angle whose slope is (sqrt 5 - 1)/2.
double golden_theta();

}  // namespace teichlab::torus
