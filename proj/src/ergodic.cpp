#include "teichlab/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "teichlab/errors.hpp"
#include "teichlab/kernels.hpp"
#include "teichlab/surface.hpp"

namespace teichlab {

// -------------------------------------------------------------- suspensions

double Suspension::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < size(); ++i) a += iet.lengths[i] * heights[i];
  return a;
}

void Suspension::check() const {
  iet.check();
  if (heights.size() != iet.size()) throw ValidationError("one height per letter required");
  for (double h : heights)
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("heights must be positive and finite");
}

Suspension make_suspension(Iet iet, std::vector<double> heights) {
  Suspension s{std::move(iet), std::move(heights)};
  s.check();
  return s;
}

Suspension random_suspension(const Permutation& perm, Rng& rng) {
  Iet iet = random_iet(perm, rng);
  std::vector<double> h = suspension_heights(perm, sample_suspension_data(perm, rng));
  Suspension s{std::move(iet), std::move(h)};
  const double a = s.area();
  for (double& v : s.heights) v /= a;
  s.check();
  return s;
}

Suspension rotation_suspension(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("rotation number must lie in (0, 1)");
  // x -> x + alpha mod 1: A = [0, 1 - alpha) moves right, B = [1 - alpha, 1) wraps.
  return make_suspension(Iet{Permutation({0, 1}, {1, 0}), {1.0 - alpha, alpha}, 0.0}, {1.0, 1.0});
}

double CohomObservable::recomputed_mean(const Suspension& s) const {
  if (c.size() != s.size()) throw ValidationError("observable size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) m += c[i] * s.iet.lengths[i] * s.heights[i];
  return m;
}

CohomObservable make_observable(const Suspension& s, std::vector<double> c) {
  for (double v : c)
    if (!std::isfinite(v)) throw ValidationError("observable values must be finite");
  CohomObservable o{std::move(c), 0.0};
  o.mean = o.recomputed_mean(s);
  return o;
}

std::vector<double> crossing_vector(const Suspension& s, const CohomObservable& c) {
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = c.c[i] * s.heights[i];
  return w;
}

CohomObservable observable_from_crossings(const Suspension& s, const std::vector<double>& w) {
  std::vector<double> c(s.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = w[i] / s.heights[i];
  return make_observable(s, std::move(c));
}

// ------------------------------------------------------------ orbit sums

double birkhoff_sum(const Iet& iet, const std::vector<double>& c, double x0, std::uint64_t n) {
  if (c.size() != iet.size()) throw ValidationError("observable size mismatch");
  const ExchangeMap map(iet);
  if (!(x0 >= 0.0 && x0 < map.total())) throw BoundaryError("start point outside the domain");
  double x = x0, sum = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    if (map.boundary_distance(x) <= 1e-14)
      throw BoundaryError("iterate " + std::to_string(k) + " lands on a discontinuity");
    const std::size_t j = map.slot(x);
    sum += c[static_cast<std::size_t>(map.label_of_slot(j))];
    x = map.map_slot(x, j);
  }
  return sum;
}

namespace {

// Walks the special flow from p through whole rectangle crossings. `piece`
// receives (value, duration) for each constant stretch, ending after T.
template <class Piece>
void walk_flow(const Suspension& s, const CohomObservable& c, const SuspensionPoint& p, double T,
               Piece&& piece) {
  const ExchangeMap map(s.iet);
  double x = p.x;
  if (!(x >= 0.0 && x < map.total())) throw ValidationError("base coordinate outside the domain");
  std::size_t j = map.slot(x);
  Label a = map.label_of_slot(j);
  double to_top = s.heights[static_cast<std::size_t>(a)] - p.y;
  if (!(p.y >= 0.0) || !(to_top > 0.0)) throw ValidationError("height coordinate outside its rectangle");
  double elapsed = 0.0;
  while (true) {
    const double left = T - elapsed;
    if (left <= to_top) {
      piece(c.c[static_cast<std::size_t>(a)], left);
      return;
    }
    piece(c.c[static_cast<std::size_t>(a)], to_top);
    elapsed += to_top;
    x = map.map_slot(x, j);
    if (map.boundary_distance(x) <= 1e-14)
      throw SingularityHit(elapsed, "special flow reaches a rectangle corner");
    j = map.slot(x);
    a = map.label_of_slot(j);
    to_top = s.heights[static_cast<std::size_t>(a)];
  }
}

}  // namespace

double flow_integral(const Suspension& s, const CohomObservable& c, const SuspensionPoint& p, double T) {
  if (!(T >= 0.0)) throw ValidationError("flow time must be nonnegative");
  if (c.c.size() != s.size()) throw ValidationError("observable size mismatch");
  double total = 0.0;
  walk_flow(s, c, p, T, [&](double v, double dt) { total += v * dt; });
  return total;
}

// --------------------------------------------------------- trajectory split

double ScaleLadder::min_height(std::size_t k) const {
  return *std::min_element(heights[k].begin(), heights[k].end());
}

ScaleLadder build_ladder(const Suspension& s, double span, std::size_t max_scales, const IetConfig& cfg) {
  s.check();
  ScaleLadder L;
  Iet cur = s.iet;
  const double l0 = cur.total_length();
  for (double& v : cur.lengths) v /= l0;
  cur.log_scale = 0.0;
  std::vector<double> h = s.heights;
  L.iets.push_back(cur);
  L.lengths.push_back(l0);
  L.heights.push_back(h);
  L.times.push_back(0.0);
  while (L.min_height(L.depth() - 1) <= span) {
    if (L.depth() >= max_scales)
      throw ScaleExhausted("ladder reached " + std::to_string(max_scales) + " scales before exceeding the span");
    VisitationMatrix b;
    zorich_step_inplace(cur, b, cfg);
    h = b.apply_transpose(h);
    L.iets.push_back(cur);
    L.lengths.push_back(l0 * std::exp(-cur.log_scale));
    L.heights.push_back(h);
    L.times.push_back(cur.log_scale);
  }
  return L;
}

double SplitDecomposition::pieces_length() const {
  double t = 0.0;
  for (const auto& p : pieces) t += p.return_time;
  return t;
}

double SplitDecomposition::multiplicity_ratio() const {
  double r = 0.0;
  for (std::size_t k = 0; k < multiplicities.size() && k + 1 < scales_log.size(); ++k)
    r = std::max(r, static_cast<double>(multiplicities[k]) * std::exp(-(scales_log[k + 1] - scales_log[k])));
  return r;
}

SplitDecomposition trajectory_split(const ScaleLadder& ladder, const Suspension& s,
                                    const SuspensionPoint& p, double T, double kp) {
  if (!(T > 0.0)) throw ValidationError("split length must be positive");
  const std::size_t K = ladder.depth() - 1;
  if (T >= ladder.min_height(K))
    throw ScaleExhausted("length exceeds the shortest return at the deepest computed scale");
  std::vector<ExchangeMap> maps;
  maps.reserve(ladder.depth());
  for (const auto& iet : ladder.iets) maps.emplace_back(iet);

  SplitDecomposition out;
  out.kp = kp;
  out.scales_log = ladder.times;
  out.multiplicities.assign(ladder.depth(), 0);

  const ExchangeMap& base = maps[0];
  const double l0 = ladder.lengths[0];
  double x = p.x;
  if (!(x >= 0.0 && x < l0)) throw ValidationError("base coordinate outside the domain");
  const Label a0 = base.label_of_slot(base.slot(x / l0));
  const double head = s.heights[static_cast<std::size_t>(a0)] - p.y;
  if (!(p.y >= 0.0) || !(head > 0.0)) throw ValidationError("height coordinate outside its rectangle");
  if (T <= head) {
    out.remainder_length = T;
    return out;
  }
  double R = T - head;
  double elapsed = head;
  x = l0 * base(x / l0);

  auto letter = [&](std::size_t k, double xk) {
    const ExchangeMap& m = maps[k];
    return static_cast<std::size_t>(m.label_of_slot(m.slot(xk / ladder.lengths[k])));
  };
  while (true) {
    if (base.boundary_distance(x / l0) <= 1e-14) throw SingularityHit(elapsed, "split orbit reaches a discontinuity");
    std::size_t kmax = 0;
    while (kmax + 1 <= K && x < ladder.lengths[kmax + 1]) ++kmax;
    std::size_t k = kmax + 1;
    while (k-- > 0) {
      if (ladder.heights[k][letter(k, x)] <= R) break;
    }
    if (k == static_cast<std::size_t>(-1)) break;
    const double rt = ladder.heights[k][letter(k, x)];
    out.pieces.push_back({k, x, rt});
    ++out.multiplicities[k];
    R -= rt;
    elapsed += rt;
    const double lk = ladder.lengths[k];
    x = std::min(lk * maps[k](x / lk), std::nextafter(lk, 0.0));
  }
  out.remainder_length = head + R;
  return out;
}

SplitDecomposition trajectory_split(const Suspension& s, const SuspensionPoint& p, double T, double kp) {
  return trajectory_split(build_ladder(s, T), s, p, T, kp);
}

double calibrate_kp(const ScaleLadder& ladder, const Suspension& s, double span, Rng& rng, int samples) {
  const ExchangeMap base(s.iet);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = uniform(rng, 0.0, base.total());
    const double h = s.heights[static_cast<std::size_t>(base.label_of_slot(base.slot(x)))];
    const SuspensionPoint p{x, uniform(rng, 0.0, h)};
    const double T = std::exp(uniform(rng, 0.0, std::log(span)));
    worst = std::max(worst, trajectory_split(ladder, s, p, T).multiplicity_ratio());
  }
  return 1.5 * worst;
}

ReturnBounds first_return_bounds(const Suspension& s, Rng& rng, int samples) {
  s.check();
  const ExchangeMap base(s.iet);
  ReturnBounds b{INFINITY, 0.0};
  for (int i = 0; i < samples; ++i) {
    const double x = uniform(rng, 0.0, base.total());
    if (base.boundary_distance(x) <= 1e-14) throw SingularityHit(0.0, "base point on a rectangle corner");
    const double h = s.heights[static_cast<std::size_t>(base.label_of_slot(base.slot(x)))];
    b.lower = std::min(b.lower, h);
    b.upper = std::max(b.upper, h);
  }
  return b;
}

// ----------------------------------------------------------------- deviation

std::vector<std::uint64_t> geometric_grid(std::uint64_t n_max, double growth) {
  std::vector<std::uint64_t> n;
  for (int k = 0;; ++k) {
    const auto v = static_cast<std::uint64_t>(std::ceil(std::pow(growth, k)));
    if (v > n_max) break;
    if (n.empty() || v > n.back()) n.push_back(v);
  }
  if (n.empty() || n.back() != n_max) n.push_back(n_max);
  return n;
}

double envelope_slope(const std::vector<double>& log_n, const std::vector<double>& log_sup, double decades) {
  const double lo = log_n.back() - decades * std::log(10.0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    if (log_n[i] < lo || !std::isfinite(log_sup[i])) continue;
    sx += log_n[i];
    sy += log_sup[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_sup[i];
    ++m;
  }
  if (m < 2) throw ValidationError("fit window holds fewer than two samples");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

DeviationReport deviation_exponent(const Suspension& s, const CohomObservable& c, double lambda_ref,
                                   const DeviationConfig& cfg) {
  const double scale = std::accumulate(c.c.begin(), c.c.end(), 0.0,
                                       [](double acc, double v) { return std::max(acc, std::abs(v)); });
  if (std::abs(c.recomputed_mean(s)) >= 1e-12 * std::max(1.0, scale))
    throw MeanError("observable mean " + std::to_string(c.recomputed_mean(s)) + " is not zero");
  if (std::pow(10.0, cfg.fit_decades) > static_cast<double>(cfg.n_max))
    throw ValidationError("n_max too small for the fit window");
  const ExchangeMap map(s.iet);
  const std::vector<double> w = crossing_vector(s, c);
  const auto grid = geometric_grid(cfg.n_max, cfg.growth);
  Rng rng(cfg.seed);
  std::vector<double> starts(static_cast<std::size_t>(cfg.starts));
  for (auto& x : starts) x = uniform(rng, 0.0, map.total());
  const auto sums = kernels::omp::orbit_sums(map, w, starts, grid);

  DeviationReport r;
  r.reference_lambda2 = lambda_ref;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double sup = 0.0;
    for (const auto& o : sums) {
      if (o.boundary_hit) throw BoundaryError("an orbit reached a discontinuity");
      sup = std::max(sup, o.sup_abs[k]);
    }
    r.n.push_back(static_cast<double>(grid[k]));
    r.log_T.push_back(std::log(static_cast<double>(grid[k])));
    r.log_sup_S.push_back(std::log(sup));
  }
  r.fitted_exponent = envelope_slope(r.log_T, r.log_sup_S, cfg.fit_decades);
  r.residual = std::abs(r.fitted_exponent - lambda_ref);
  return r;
}

// ------------------------------------------------------- double averages

double gh_average(const torus::FourierFunction& f, double theta, double x, double y, double T, double dt) {
  if (!(T > 0.0)) throw ValidationError("averaging time must be positive");
  if (std::abs(f.coeff({0, 0})) > 1e-12) throw MeanError("observable has a nonzero mean");
  const double c = std::cos(theta), s = std::sin(theta);
  const auto steps = static_cast<std::uint64_t>(std::ceil(T / dt));
  const double h = T / static_cast<double>(steps);
  double F = 0.0, G = 0.0;
  double f_prev = f.real_value(x, y);
  for (std::uint64_t k = 1; k <= steps; ++k) {
    const double t = h * static_cast<double>(k);
    const double f_next = f.real_value(x + c * t, y + s * t);
    const double F_next = F + 0.5 * h * (f_prev + f_next);
    G += 0.5 * h * (F + F_next);
    F = F_next;
    f_prev = f_next;
  }
  return G / T;
}

std::vector<double> gh_series(const Suspension& s, const CohomObservable& c, const SuspensionPoint& p,
                              const std::vector<double>& T) {
  if (T.empty()) return {};
  if (!(T.front() > 0.0) || !std::is_sorted(T.begin(), T.end()))
    throw ValidationError("averaging times must be positive and increasing");
  const double scale = std::accumulate(c.c.begin(), c.c.end(), 0.0,
                                       [](double acc, double v) { return std::max(acc, std::abs(v)); });
  if (std::abs(c.recomputed_mean(s)) >= 1e-12 * std::max(1.0, scale))
    throw MeanError("observable mean is not zero");
  std::vector<double> out;
  out.reserve(T.size());
  double t = 0.0, F = 0.0, G = 0.0;
  std::size_t next = 0;
  walk_flow(s, c, p, T.back(), [&](double v, double dt) {
    double remaining = dt;
    // Emit every requested time falling inside this constant stretch.
    while (next < T.size() && t + remaining >= T[next]) {
      const double part = T[next] - t;
      G += F * part + 0.5 * v * part * part;
      F += v * part;
      t = T[next];
      remaining -= part;
      out.push_back(G / t);
      ++next;
    }
    if (remaining > 0.0) {
      G += F * remaining + 0.5 * v * remaining * remaining;
      F += v * remaining;
      t += remaining;
    }
  });
  while (out.size() < T.size()) out.push_back(G / T[out.size()]);
  return out;
}

double gh_average(const Suspension& s, const CohomObservable& c, const SuspensionPoint& p, double T) {
  return gh_series(s, c, p, {T}).front();
}

// --------------------------------------------------------- obstructions

namespace {

Eigen::MatrixXd splitting_basis(const Suspension& s, const OseledecSplitting& split) {
  const auto d = static_cast<Eigen::Index>(s.size());
  if (split.e_plus.rows() != d || split.e_minus.rows() != d)
    throw ValidationError("splitting dimension does not match the suspension");
  const Eigen::MatrixXd om = omega(s.iet.perm).to_dense();
  const Eigen::MatrixXd ker = Eigen::FullPivLU<Eigen::MatrixXd>(om).kernel();
  const Eigen::Index kc = split.e_plus.cols() + split.e_minus.cols() < d ? ker.cols() : 0;
  Eigen::MatrixXd basis(d, split.e_plus.cols() + split.e_minus.cols() + kc);
  basis << split.e_plus, split.e_minus, ker.leftCols(kc);
  if (basis.cols() != d) throw ValidationError("splitting basis is not square");
  return basis;
}

}  // namespace

Eigen::VectorXd obstruction_coefficients(const Suspension& s, const CohomObservable& c,
                                         const OseledecSplitting& split) {
  if (c.c.size() != s.size()) throw ValidationError("observable size mismatch");
  const std::vector<double> w = crossing_vector(s, c);
  const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return splitting_basis(s, split).colPivHouseholderQr().solve(wv);
}

CohomObservable project_observable(const Suspension& s, const CohomObservable& c,
                                   const OseledecSplitting& split, bool stable_only) {
  const Eigen::VectorXd x = obstruction_coefficients(s, c, split);
  const Eigen::Index g = split.e_plus.cols();
  const std::vector<double> w0 = crossing_vector(s, c);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(w0.data(), static_cast<Eigen::Index>(w0.size()));
  if (stable_only) {
    w = split.e_minus * x.segment(g, split.e_minus.cols());
  } else {
    for (Eigen::Index i = 1; i < g; ++i) w -= x(i) * split.e_plus.col(i);
  }
  // Remove the rounding-level mean the estimated subspaces leave behind.
  const Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(s.iet.lengths.data(), w.size());
  w -= (w.dot(lam) / lam.squaredNorm()) * lam;
  std::vector<double> wv(w.data(), w.data() + w.size());
  return observable_from_crossings(s, wv);
}

// ------------------------------------------------ stratum-level experiments

SplitSuspension oseledec_suspension(const Permutation& perm, std::uint64_t seed, std::uint64_t burn) {
  Rng rng(derive_seed(seed, 1));
  const Iet start = random_iet(perm, rng);
  OseledecSplitting split = oseledec_subspaces(start, burn, seed);
  Iet base = split.base;
  base.log_scale = 0.0;
  std::vector<double> h = suspension_heights(base.perm, sample_suspension_data(base.perm, rng));
  Suspension s{std::move(base), std::move(h)};
  const double a = s.area();
  for (double& v : s.heights) v /= a;
  s.check();
  return {std::move(s), std::move(split)};
}

CohomObservable generic_observable(const Suspension& s, Rng& rng) {
  std::vector<double> c(s.size());
  for (double& v : c) v = uniform(rng, -1.0, 1.0);
  const double shift = make_observable(s, c).mean / s.area();
  for (double& v : c) v -= shift;
  return make_observable(s, std::move(c));
}

DeviationEnsemble deviation_ensemble(const Permutation& perm, int suspensions, std::uint64_t seed,
                                     const DeviationConfig& cfg, std::uint64_t burn) {
  DeviationEnsemble out;
  for (int k = 0; k < suspensions; ++k) out.seeds.push_back(derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)));
  const auto fits = kernels::omp::map_seeds<std::pair<double, double>>(out.seeds, [&](std::uint64_t sd) {
    const SplitSuspension ss = oseledec_suspension(perm, sd, burn);
    Rng rng(derive_seed(sd, 2));
    const CohomObservable c = generic_observable(ss.suspension, rng);
    DeviationConfig dc = cfg;
    dc.seed = derive_seed(sd, 3);
    // Nested regions run on one thread; the ensemble is the parallel axis.
    const double g = deviation_exponent(ss.suspension, c, 0.0, dc).fitted_exponent;
    const double p = deviation_exponent(ss.suspension, project_observable(ss.suspension, c, ss.splitting), 0.0, dc)
                         .fitted_exponent;
    return std::make_pair(g, p);
  });
  for (const auto& [g, p] : fits) {
    out.generic.push_back(g);
    out.projected.push_back(p);
  }
  out.mean_generic = std::accumulate(out.generic.begin(), out.generic.end(), 0.0) / suspensions;
  out.mean_projected = std::accumulate(out.projected.begin(), out.projected.end(), 0.0) / suspensions;
  return out;
}

}  // namespace teichlab
