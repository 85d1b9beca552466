#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "teichlab/cocycle.hpp"
#include "teichlab/iet.hpp"
#include "teichlab/spectral_torus.hpp"

namespace teichlab {

// Special flow under the roof function `heights` (constant per letter) over
// an IET: the vertical flow on zippered rectangles.
struct Suspension {
  Iet iet;
  std::vector<double> heights;

  std::size_t size() const noexcept { return iet.size(); }
  double area() const;
  void check() const;
};

Suspension make_suspension(Iet iet, std::vector<double> heights);

// Lengths uniform on the simplex, heights -Omega tau from sampled suspension
// data, rescaled so the area is 1.
Suspension random_suspension(const Permutation& perm, Rng& rng);

// Circle rotation by alpha as a 2-letter suspension with unit heights.
Suspension rotation_suspension(double alpha);

// Piecewise-constant observable: value c[a] on the rectangle of letter a.
struct CohomObservable {
  std::vector<double> c;
  double mean = 0.0;  // sum c_a lambda_a h_a

  double recomputed_mean(const Suspension& s) const;
};

CohomObservable make_observable(const Suspension& s, std::vector<double> c);

// Rectangle integrals w_a = c_a h_a; Birkhoff sums of w along the IET are the
// flow integrals over full returns.
std::vector<double> crossing_vector(const Suspension& s, const CohomObservable& c);
CohomObservable observable_from_crossings(const Suspension& s, const std::vector<double>& w);

struct SuspensionPoint {
  double x = 0.0;  // base coordinate in [0, total length)
  double y = 0.0;  // height inside the rectangle above x
};

// sum_{k<n} c[letter(T^k x0)]; the observable is indexed by letter.
double birkhoff_sum(const Iet& iet, const std::vector<double>& c, double x0, std::uint64_t n);

double flow_integral(const Suspension& s, const CohomObservable& c, const SuspensionPoint& p, double T);

// --------------------------------------------------------- trajectory split

// Nested base intervals [0, L_k) of the Zorich renormalization path with
// their return times h^(k) = B_k^T h^(k-1).
struct ScaleLadder {
  std::vector<Iet> iets;                    // normalized to total 1
  std::vector<double> lengths;              // L_k
  std::vector<std::vector<double>> heights; // h^(k), by label of scale k
  std::vector<double> times;                // t_k = log(L_0 / L_k)

  std::size_t depth() const noexcept { return iets.size(); }
  double min_height(std::size_t k) const;
};

// Scales 0..K with K the first scale whose shortest return exceeds `span`
// (at most `max_scales`).
ScaleLadder build_ladder(const Suspension& s, double span, std::size_t max_scales = 10'000,
                         const IetConfig& cfg = {});

struct SplitPiece {
  std::size_t scale;
  double start;        // base point on [0, L_k)
  double return_time;  // T^(k) at the start point
};

struct SplitDecomposition {
  std::vector<SplitPiece> pieces;
  double remainder_length = 0.0;
  std::vector<double> scales_log;           // t_k of the ladder used
  std::vector<std::uint64_t> multiplicities; // m_k
  double kp = 0.0;

  double pieces_length() const;
  // max_k m_k exp(-(t_{k+1} - t_k)).
  double multiplicity_ratio() const;
  bool bound_holds() const { return multiplicity_ratio() <= kp; }
};

// Greedy decomposition of the length-T orbit from p into principal returns.
// Throws ScaleExhausted when T reaches the deepest scale's shortest return.
SplitDecomposition trajectory_split(const ScaleLadder& ladder, const Suspension& s,
                                    const SuspensionPoint& p, double T, double kp = 0.0);

// Builds a ladder deep enough for T, then splits.
SplitDecomposition trajectory_split(const Suspension& s, const SuspensionPoint& p, double T, double kp = 0.0);

// 1.5 x the largest multiplicity ratio over `samples` random (p, T) with T
// log-uniform in [1, span].
double calibrate_kp(const ScaleLadder& ladder, const Suspension& s, double span, Rng& rng,
                    int samples = 200);

struct ReturnBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Empirical range of first-return times to the base over random base points.
ReturnBounds first_return_bounds(const Suspension& s, Rng& rng, int samples = 1000);

// ----------------------------------------------------------------- deviation

struct DeviationConfig {
  std::uint64_t n_max = 1'000'000;
  int starts = 8;
  std::uint64_t seed = 1;
  double growth = 1.25;     // sample n = ceil(growth^k)
  double fit_decades = 2.0;
};

struct DeviationReport {
  std::vector<double> n;          // sampled iterate counts
  std::vector<double> log_T;      // log n
  std::vector<double> log_sup_S;  // log sup_{m<=n} |S_m| (max over starts)
  double fitted_exponent = 0.0;
  double reference_lambda2 = 0.0;
  double residual = 0.0;
};

std::vector<std::uint64_t> geometric_grid(std::uint64_t n_max, double growth);

// Least-squares slope of log sup |S| against log n over the last decades.
double envelope_slope(const std::vector<double>& log_n, const std::vector<double>& log_sup, double decades);

// Throws MeanError unless |mean| < 1e-12.
DeviationReport deviation_exponent(const Suspension& s, const CohomObservable& c, double lambda_ref,
                                   const DeviationConfig& cfg = {});

// ------------------------------------------------------- double averages

// (1/T) int_0^T int_0^tau f(F_s p) ds dtau along the torus flow in direction
// theta, by cumulative trapezoid integration with `dt` steps.
double gh_average(const torus::FourierFunction& f, double theta, double x, double y, double T,
                  double dt = 1e-3);

// Same along the special flow; exact on each constant piece. Values at each
// requested T (increasing) in one pass.
std::vector<double> gh_series(const Suspension& s, const CohomObservable& c, const SuspensionPoint& p,
                              const std::vector<double>& T);
double gh_average(const Suspension& s, const CohomObservable& c, const SuspensionPoint& p, double T);

// --------------------------------------------------------- obstructions

// Coordinates of w = c h in the basis [E+ | E- | ker Omega]. The E+ entries
// past the first are the invariant-distribution values D_i(c).
Eigen::VectorXd obstruction_coefficients(const Suspension& s, const CohomObservable& c,
                                         const OseledecSplitting& split);

// Observable with crossing vector w - sum_i D_i(c) E+_i (i >= 1) or, with
// `stable_only`, the E- part alone.
CohomObservable project_observable(const Suspension& s, const CohomObservable& c,
                                   const OseledecSplitting& split, bool stable_only = false);

// ------------------------------------------------ stratum-level experiments

// Suspension at the end of a burn-in along a random renormalization path,
// with the Oseledets splitting estimated there.
struct SplitSuspension {
  Suspension suspension;
  OseledecSplitting splitting;
};

SplitSuspension oseledec_suspension(const Permutation& perm, std::uint64_t seed, std::uint64_t burn = 2000);

// Entries uniform in [-1, 1], shifted by a constant to zero mean.
CohomObservable generic_observable(const Suspension& s, Rng& rng);

struct DeviationEnsemble {
  std::vector<std::uint64_t> seeds;
  std::vector<double> generic;    // fitted exponent per suspension
  std::vector<double> projected;  // same observable with the E+ obstructions removed
  double mean_generic = 0.0;
  double mean_projected = 0.0;
};

// Independent suspensions (seed k derived from `seed`), fitted in parallel and
// reported in seed order.
DeviationEnsemble deviation_ensemble(const Permutation& perm, int suspensions, std::uint64_t seed,
                                     const DeviationConfig& cfg = {}, std::uint64_t burn = 2000);

}  // namespace teichlab
