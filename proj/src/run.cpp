#include "teichlab/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "teichlab/cocycle.hpp"
#include "teichlab/errors.hpp"
#include "teichlab/ergodic.hpp"
#include "teichlab/io.hpp"
#include "teichlab/spectral_torus.hpp"
#include "teichlab/surface.hpp"

namespace teichlab {

using OJson = nlohmann::ordered_json;

namespace {

// ----------------------------------------------------------- param parsing

class Params {
 public:
  explicit Params(const std::map<std::string, std::string>& p) : p_(p) {}

  bool has(const std::string& k) const { return p_.count(k) > 0; }

  std::string str(const std::string& k, const std::string& def) const {
    auto it = p_.find(k);
    return it == p_.end() ? def : it->second;
  }

  double real(const std::string& k, double def) const {
    auto it = p_.find(k);
    if (it == p_.end()) return def;
    return parse_real(k, it->second);
  }

  std::uint64_t count(const std::string& k, std::uint64_t def) const {
    auto it = p_.find(k);
    if (it == p_.end()) return def;
    const double v = parse_real(k, it->second);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e18)
      throw UsageError("--" + k + " must be a nonnegative integer (got '" + it->second + "')");
    return static_cast<std::uint64_t>(v);
  }

  std::vector<int> int_list(const std::string& k, const std::vector<int>& def) const {
    auto it = p_.find(k);
    if (it == p_.end()) return def;
    std::vector<int> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const double v = parse_real(k, tok);
      if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("--" + k + " entries must be integers");
      out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw UsageError("--" + k + " is empty");
    return out;
  }

  static double parse_real(const std::string& k, const std::string& v) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw UsageError("--" + k + " expects a number (got '" + v + "')");
    }
  }

 private:
  const std::map<std::string, std::string>& p_;
};

double parse_theta(const Params& p, const std::string& def) {
  const std::string t = p.str("theta", def);
  if (t == "golden") return torus::golden_theta();
  if (t == "pi/2") return std::numbers::pi / 2.0;
  if (t == "liouville") {
    // Slope [0; 1 x10, 10^4, 1, 1, ...]: bounded early, one huge quotient.
    std::vector<std::uint64_t> q(10, 1);
    q.push_back(10'000);
    q.insert(q.end(), 10, 1);
    return std::atan(static_cast<double>(torus::evaluate_continued_fraction(q)));
  }
  return Params::parse_real("theta", t);
}

OJson vec_json(const std::vector<double>& v) {
  OJson a = OJson::array();
  for (double x : v) a.push_back(x);
  return a;
}

struct Output {
  OJson payload = OJson::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// ---------------------------------------------------------------- commands

Output cmd_lyapunov(const Params& p, std::uint64_t seed) {
  const std::string stratum = p.str("stratum", "h2");
  const Permutation perm = stratum_permutation(stratum);
  KzConfig cfg;
  cfg.steps = p.count("steps", 100'000);
  cfg.qr_period = static_cast<int>(p.count("qr-period", 10));
  cfg.seed = derive_seed(seed, 1);
  const int seeds = static_cast<int>(p.count("seeds", 3));
  if (cfg.steps < 100 || seeds < 1 || cfg.qr_period < 1) throw UsageError("need steps >= 100, seeds >= 1, qr-period >= 1");
  const ExponentEstimate est = kz_exponents(perm, cfg, seeds);
  const SpectrumReport chk = spectrum_checks(est);
  Output o;
  OJson sd = OJson::array();
  for (auto s : est.seeds) sd.push_back(s);
  o.payload["stratum"] = stratum;
  o.payload["genus"] = est.genus();
  o.payload["lambdas"] = vec_json(est.lambdas);
  o.payload["stderr"] = vec_json(est.stderr_);
  o.payload["raw"] = vec_json(est.raw);
  o.payload["raw_top_half"] = est.raw_top_half;
  o.payload["raw_top_stability"] = std::abs(est.raw[0] - est.raw_top_half) / std::abs(est.raw[0]);
  o.payload["steps"] = est.steps;
  o.payload["teich_time"] = est.teich_time;
  o.payload["seeds"] = sd;
  o.payload["pair_sums"] = vec_json(chk.pair_sums);
  o.payload["checks"] = {{"symmetry", chk.symmetry},
                         {"gap", chk.gap},
                         {"hyperbolic", chk.hyperbolic},
                         {"gap_vacuous", chk.gap_vacuous},
                         {"hyperbolic_vacuous", chk.hyperbolic_vacuous}};
  o.columns = {"i", "lambda", "stderr"};
  for (std::size_t i = 0; i < est.lambdas.size(); ++i)
    o.rows.push_back({static_cast<double>(i + 1), est.lambdas[i], est.stderr_[i]});
  return o;
}

double reference_lambda2(const Params& p, const Permutation& perm, std::uint64_t seed) {
  if (p.has("lambda-ref")) return p.real("lambda-ref", 0.0);
  if (omega(perm).genus() < 2) return 0.0;
  KzConfig cfg;
  cfg.steps = p.count("kz-steps", 200'000);
  cfg.seed = derive_seed(seed, 9);
  return kz_exponents(perm, cfg, 1).lambdas[1];
}

Output cmd_deviation(const Params& p, std::uint64_t seed) {
  const std::string surface = p.str("surface", "h2");
  const Permutation perm = stratum_permutation(surface);
  DeviationConfig dc;
  dc.n_max = p.count("n", 1'000'000);
  dc.starts = static_cast<int>(p.count("starts", 8));
  const std::uint64_t burn = p.count("burn", 2000);
  const std::string kind = p.str("observable", "generic");
  if (kind != "generic" && kind != "projected" && kind != "stable")
    throw UsageError("--observable must be generic, projected or stable");
  const double lref = reference_lambda2(p, perm, seed);
  Output o;
  o.payload["surface"] = surface;
  o.payload["reference_lambda2"] = lref;

  const auto ensemble = p.count("ensemble", 0);
  if (ensemble > 0) {
    dc.seed = derive_seed(seed, 4);
    const DeviationEnsemble e = deviation_ensemble(perm, static_cast<int>(ensemble), derive_seed(seed, 2), dc, burn);
    o.payload["suspensions"] = ensemble;
    o.payload["n_max"] = dc.n_max;
    o.payload["generic"] = vec_json(e.generic);
    o.payload["projected"] = vec_json(e.projected);
    o.payload["mean_generic"] = e.mean_generic;
    o.payload["mean_projected"] = e.mean_projected;
    o.payload["residual"] = std::abs(e.mean_generic - lref);
    o.payload["hierarchy_drop"] = e.mean_generic - e.mean_projected;
    o.columns = {"suspension", "generic", "projected"};
    for (std::size_t i = 0; i < e.generic.size(); ++i)
      o.rows.push_back({static_cast<double>(i), e.generic[i], e.projected[i]});
    return o;
  }

  const SplitSuspension ss = oseledec_suspension(perm, derive_seed(seed, 2), burn);
  Rng rng(derive_seed(seed, 3));
  CohomObservable c = generic_observable(ss.suspension, rng);
  if (kind != "generic") c = project_observable(ss.suspension, c, ss.splitting, kind == "stable");
  dc.seed = derive_seed(seed, 4);
  const DeviationReport r = deviation_exponent(ss.suspension, c, lref, dc);
  const Eigen::VectorXd coef = obstruction_coefficients(ss.suspension, c, ss.splitting);
  o.payload["observable"] = kind;
  o.payload["n_max"] = dc.n_max;
  o.payload["fitted_exponent"] = r.fitted_exponent;
  o.payload["residual"] = r.residual;
  o.payload["obstruction_coefficients"] = vec_json(std::vector<double>(coef.data(), coef.data() + coef.size()));
  o.payload["samples"] = r.n.size();
  o.columns = {"n", "sup_abs_sum"};
  for (std::size_t i = 0; i < r.n.size(); ++i) o.rows.push_back({r.n[i], std::exp(r.log_sup_S[i])});
  return o;
}

torus::FourierFunction default_potential() {
  torus::FourierFunction v;
  v.add_real_mode({1, 0}, {0.5, 0.0});
  v.add_real_mode({1, 2}, {0.0, -0.25});
  v.set_reality_flag(true);
  return v;
}

Output cmd_solve_torus(const Params& p, std::uint64_t) {
  const double theta = parse_theta(p, "golden");
  torus::FourierFunction f;
  torus::FourierFunction v;
  const bool from_file = p.has("f");
  if (from_file) {
    f = io::fourier_from_json(io::read_json_file(p.str("f", "")));
  } else {
    v = default_potential();
    f = torus::directional_derivative(v, theta);
  }
  const torus::FourierFunction u = torus::small_divisor_solve(f, theta);
  const torus::FourierFunction back = torus::directional_derivative(u, theta);
  double residual = 0.0;
  for (const auto& [n, c] : f.coeffs()) residual = std::max(residual, std::abs(back.coeff(n) - c));
  for (const auto& [n, c] : back.coeffs()) residual = std::max(residual, std::abs(c - f.coeff(n)));
  Output o;
  o.payload["theta"] = theta;
  o.payload["source"] = from_file ? "file" : "coboundary of the default potential";
  o.payload["solution"] = io::to_json(u);
  o.payload["residual"] = residual;
  o.payload["norms"] = {{"s0", torus::friedrichs_norm(u, 0.0)},
                        {"s1", torus::friedrichs_norm(u, 1.0)},
                        {"s2", torus::friedrichs_norm(u, 2.0)}};
  if (!from_file) {
    double err = 0.0;
    for (const auto& [n, c] : v.coeffs())
      if (n != torus::Frequency{0, 0}) err = std::max(err, std::abs(u.coeff(n) - c));
    o.payload["potential_error"] = err;
  }
  o.columns = {"n1", "n2", "re", "im"};
  for (const auto& [n, c] : u.coeffs())
    o.rows.push_back({static_cast<double>(n.first), static_cast<double>(n.second), c.real(), c.imag()});
  return o;
}

Output cmd_loss(const Params& p, std::uint64_t) {
  const double theta = parse_theta(p, "golden");
  const double eps = p.real("eps", 0.1);
  const double s = p.real("s", 2.0);
  std::vector<int> ladder = p.int_list("nmax", {256});
  if (ladder.size() == 1) {
    const int top = ladder[0];
    ladder.clear();
    for (int n = 32; n <= top; n *= 2) ladder.push_back(n);
    if (ladder.empty() || ladder.back() != top) ladder.push_back(top);
  }
  const std::vector<double> series = torus::loss_series(theta, s, ladder, eps);
  const torus::DirectionArithmetic da = torus::direction_arithmetic(theta, 20);
  Output o;
  o.payload["theta"] = theta;
  o.payload["s"] = s;
  o.payload["eps"] = eps;
  o.payload["nmax"] = ladder;
  o.payload["sup_ratio"] = vec_json(series);
  o.payload["final_over_first"] = series.back() / series.front();
  o.payload["stabilizes"] = series.back() / series.front() < 1.5;
  o.payload["partial_quotients"] = da.partial_quotients;
  o.payload["bounded_type"] = da.type_flags.bounded_type;
  o.columns = {"N", "sup_ratio"};
  for (std::size_t i = 0; i < ladder.size(); ++i) o.rows.push_back({static_cast<double>(ladder[i]), series[i]});
  return o;
}

Output cmd_gh_bound(const Params& p, std::uint64_t seed) {
  const std::string surface = p.str("surface", "h2");
  const int points = static_cast<int>(p.count("points", 8));
  Rng rng(derive_seed(seed, 5));
  Output o;
  o.payload["surface"] = surface;
  if (surface == "torus") {
    // f = S_theta v for v = cos(2 pi y); the double average recovers mean(v) - v.
    const double theta = parse_theta(p, "pi/2");
    const double tmax = p.real("tmax", 1e3);
    torus::FourierFunction v;
    v.add_real_mode({0, 1}, {0.5, 0.0});
    v.set_reality_flag(true);
    const torus::FourierFunction f = torus::directional_derivative(v, theta);
    std::vector<double> grid;
    for (double T = 1.0; T < tmax; T *= 10.0) grid.push_back(T);
    grid.push_back(tmax);
    std::vector<double> err(grid.size(), 0.0);
    for (int i = 0; i < points; ++i) {
      const double x = uniform01(rng), y = uniform01(rng);
      const double target = v.real_value(x, y);  // mean(v) = 0
      for (std::size_t k = 0; k < grid.size(); ++k)
        err[k] = std::max(err[k], std::abs(-gh_average(f, theta, x, y, grid[k]) - target));
    }
    o.payload["theta"] = theta;
    o.payload["tmax"] = tmax;
    o.payload["terminal_error"] = err.back();
    o.payload["recovered"] = err.back() < 0.05;
    o.columns = {"T", "max_error"};
    for (std::size_t k = 0; k < grid.size(); ++k) o.rows.push_back({grid[k], err[k]});
    return o;
  }

  const Permutation perm = stratum_permutation(surface);
  const std::string kind = p.str("observable", "stable");
  if (kind != "stable" && kind != "generic") throw UsageError("--observable must be stable or generic");
  const double tmax = p.real("tmax", 1e6);
  if (tmax < 1e3) throw UsageError("--tmax must be at least 1e3");
  const SplitSuspension ss = oseledec_suspension(perm, derive_seed(seed, 2), p.count("burn", 2000));
  CohomObservable c = generic_observable(ss.suspension, rng);
  if (kind == "stable") c = project_observable(ss.suspension, c, ss.splitting, true);

  DeviationConfig dc;
  dc.n_max = static_cast<std::uint64_t>(tmax);
  dc.starts = points;
  dc.seed = derive_seed(seed, 6);
  const DeviationReport br = deviation_exponent(ss.suspension, c, 0.0, dc);

  std::vector<double> grid;
  for (double T : geometric_grid(static_cast<std::uint64_t>(tmax), 1.25)) grid.push_back(T);
  std::vector<double> sup(grid.size(), 0.0);
  const ExchangeMap base(ss.suspension.iet);
  for (int i = 0; i < points; ++i) {
    const double x = uniform(rng, 0.0, base.total());
    const double h = ss.suspension.heights[static_cast<std::size_t>(base.label_of_slot(base.slot(x)))];
    const auto u = gh_series(ss.suspension, c, {x, uniform(rng, 0.0, h)}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) sup[k] = std::max(sup[k], std::abs(u[k]));
  }
  for (std::size_t k = 1; k < sup.size(); ++k) sup[k] = std::max(sup[k], sup[k - 1]);
  std::vector<double> lt, ls;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    lt.push_back(std::log(grid[k]));
    ls.push_back(std::log(sup[k]));
  }
  const double gh_slope = envelope_slope(lt, ls, 1.0);
  o.payload["observable"] = kind;
  o.payload["tmax"] = tmax;
  o.payload["birkhoff_slope"] = br.fitted_exponent;
  o.payload["birkhoff_sup"] = std::exp(br.log_sup_S.back());
  o.payload["gh_sup"] = sup.back();
  o.payload["gh_slope_last_decade"] = gh_slope;
  o.payload["bounded"] = br.fitted_exponent < 0.05;
  o.columns = {"T", "sup_abs_uT"};
  for (std::size_t k = 0; k < grid.size(); ++k) o.rows.push_back({grid[k], sup[k]});
  return o;
}

Output cmd_surface(const std::vector<std::string>& pos, const Params& p, std::uint64_t) {
  if (pos.size() != 2 || (pos[0] != "validate" && pos[0] != "catalog"))
    throw UsageError("usage: surface validate <file> | surface catalog <torus|octagon|l_shape|h11_model>");
  TranslationSurface s = [&] {
    if (pos[0] == "validate") return io::surface_from_json(io::read_json_file(pos[1]));
    CatalogParams cp;
    cp.a = p.real("a", cp.a);
    cp.b = p.real("b", cp.b);
    return build_catalog(catalog_from_name(pos[1]), cp);
  }();
  Output o;
  const SurfaceReport r = validate(s);
  o.payload["genus"] = r.genus;
  o.payload["stratum"] = r.stratum;
  o.payload["marked_points"] = r.marked_points;
  o.payload["area"] = r.area;
  o.payload["cone_angles"] = vec_json(r.cone_angles);
  if (p.has("saddle-bound")) {
    const double len = shortest_saddle_connection(s, p.real("saddle-bound", 1.0));
    o.payload["shortest_saddle_connection"] = std::isfinite(len) ? OJson(len) : OJson(nullptr);
  }
  o.columns = {"vertex_class", "cone_angle"};
  for (std::size_t i = 0; i < r.cone_angles.size(); ++i) o.rows.push_back({static_cast<double>(i), r.cone_angles[i]});
  return o;
}

Output cmd_weyl(const Params& p, std::uint64_t) {
  Output o;
  const double c = 1.0 / (4.0 * std::numbers::pi);
  o.columns = {"Lambda", "count", "ratio"};
  if (!p.has("range")) {
    const double lambda = p.real("lambda", 1e3);
    if (!(lambda > 0.0)) throw UsageError("--lambda must be positive");
    const auto n = torus::weyl_count(lambda);
    o.payload["lambda"] = lambda;
    o.payload["count"] = n;
    o.payload["ratio"] = static_cast<double>(n) / lambda;
    o.rows.push_back({lambda, static_cast<double>(n), static_cast<double>(n) / lambda});
    return o;
  }
  const std::string range = p.str("range", "");
  const auto colon = range.find(':');
  if (colon == std::string::npos) throw UsageError("--range expects lo:hi");
  const double lo = Params::parse_real("range", range.substr(0, colon));
  const double hi = Params::parse_real("range", range.substr(colon + 1));
  if (!(lo > 0.0 && hi > lo)) throw UsageError("--range needs 0 < lo < hi");
  std::vector<double> grid;
  const auto points = p.count("points", 0);
  if (points >= 2) {
    for (std::uint64_t k = 0; k < points; ++k)
      grid.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(points - 1)));
  } else {
    // 1-2-5 decade grid.
    for (double dec = std::pow(10.0, std::floor(std::log10(lo))); dec <= hi; dec *= 10.0)
      for (double m : {1.0, 2.0, 5.0})
        if (m * dec >= lo * (1 - 1e-12) && m * dec <= hi * (1 + 1e-12)) grid.push_back(m * dec);
  }
  double dev = 0.0;
  for (double l : grid) {
    const auto n = torus::weyl_count(l);
    const double r = static_cast<double>(n) / l;
    dev = std::max(dev, std::abs(r / c - 1.0));
    o.rows.push_back({l, static_cast<double>(n), r});
  }
  o.payload["range"] = {lo, hi};
  o.payload["grid_points"] = grid.size();
  o.payload["constant"] = c;
  o.payload["max_relative_deviation"] = dev;
  o.payload["linear_within_2pct"] = dev < 0.02;
  return o;
}

Output cmd_split(const Params& p, std::uint64_t seed) {
  const std::string surface = p.str("surface", "h2");
  const Permutation perm = stratum_permutation(surface);
  const int samples = static_cast<int>(p.count("samples", 100));
  const double tmax = p.real("tmax", 1e4);
  if (!(tmax > 1.0)) throw UsageError("--tmax must exceed 1");
  Rng rng(derive_seed(seed, 2));
  const Suspension s = random_suspension(perm, rng);
  const ScaleLadder ladder = build_ladder(s, tmax);
  Rng cal(derive_seed(seed, 7));
  const double kp = calibrate_kp(ladder, s, tmax, cal, static_cast<int>(p.count("calibration", 200)));
  Rng smp(derive_seed(seed, 8));
  const ExchangeMap base(s.iet);
  double worst_book = 0.0, worst_ratio = 0.0;
  bool all_bounds = true;
  Output o;
  o.columns = {"T", "pieces", "remainder", "multiplicity_ratio"};
  for (int i = 0; i < samples; ++i) {
    const double x = uniform(smp, 0.0, base.total());
    const double h = s.heights[static_cast<std::size_t>(base.label_of_slot(base.slot(x)))];
    const SuspensionPoint pt{x, uniform(smp, 0.0, h)};
    const double T = std::exp(uniform(smp, 0.0, std::log(tmax)));
    const SplitDecomposition d = trajectory_split(ladder, s, pt, T, kp);
    worst_book = std::max(worst_book, std::abs(d.pieces_length() + d.remainder_length - T) / T);
    worst_ratio = std::max(worst_ratio, d.multiplicity_ratio());
    all_bounds = all_bounds && d.bound_holds();
    o.rows.push_back({T, static_cast<double>(d.pieces.size()), d.remainder_length, d.multiplicity_ratio()});
  }
  o.payload["surface"] = surface;
  o.payload["samples"] = samples;
  o.payload["tmax"] = tmax;
  o.payload["scales"] = ladder.depth();
  o.payload["kp"] = kp;
  o.payload["worst_bookkeeping"] = worst_book;
  o.payload["worst_multiplicity_ratio"] = worst_ratio;
  o.payload["bounds_hold"] = all_bounds;
  return o;
}

}  // namespace

const std::vector<std::string>& known_params(const std::string& command) {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"lyapunov", {"stratum", "steps", "seeds", "qr-period", "csv"}},
      {"deviation", {"surface", "n", "observable", "starts", "burn", "kz-steps", "lambda-ref", "ensemble", "csv"}},
      {"solve-torus", {"f", "theta", "csv"}},
      {"loss", {"theta", "eps", "s", "nmax", "csv"}},
      {"gh-bound", {"surface", "observable", "tmax", "points", "burn", "theta", "csv"}},
      {"surface", {"a", "b", "saddle-bound", "csv"}},
      {"weyl", {"lambda", "range", "points", "csv"}},
      {"split", {"surface", "samples", "tmax", "calibration", "csv"}},
  };
  auto it = keys.find(command);
  if (it == keys.end()) throw UsageError("unknown command '" + command + "'");
  return it->second;
}

nlohmann::ordered_json ResultEnvelope::to_json() const {
  return {{"artifact", "teichlab"}, {"version", version}, {"config", config}, {"wall_time_s", wall_time}, {"payload", payload}};
}

ResultEnvelope run(const RunConfig& config) {
  const auto& keys = known_params(config.command);
  for (const auto& [k, v] : config.params)
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw UsageError("unknown key '" + k + "' for command " + config.command);
  if (config.format != "json" && config.format != "csv") throw UsageError("format must be json or csv");
  if (config.command != "surface" && !config.positional.empty())
    throw UsageError("command " + config.command + " takes no positional arguments");

  std::uint64_t seed = config.seed;
  std::string seed_source = "cli";
  if (const char* env = std::getenv("TEICHLAB_SEED"); env && *env) {
    const double v = Params::parse_real("TEICHLAB_SEED", env);
    if (!(v >= 0.0) || v != std::floor(v)) throw UsageError("TEICHLAB_SEED must be a nonnegative integer");
    seed = std::stoull(env);
    seed_source = "env";
  }

  const auto t0 = std::chrono::steady_clock::now();
  const Params p(config.params);
  Output o;
  const std::string& c = config.command;
  if (c == "lyapunov") o = cmd_lyapunov(p, seed);
  else if (c == "deviation") o = cmd_deviation(p, seed);
  else if (c == "solve-torus") o = cmd_solve_torus(p, seed);
  else if (c == "loss") o = cmd_loss(p, seed);
  else if (c == "gh-bound") o = cmd_gh_bound(p, seed);
  else if (c == "surface") o = cmd_surface(config.positional, p, seed);
  else if (c == "weyl") o = cmd_weyl(p, seed);
  else o = cmd_split(p, seed);

  ResultEnvelope env;
  env.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  OJson params = OJson::object();
  for (const auto& [k, v] : config.params) params[k] = v;
  env.config = {{"command", c},   {"positional", config.positional}, {"seed", seed}, {"seed_source", seed_source},
                {"params", params}, {"format", config.format},       {"out", config.out}};
  env.payload = std::move(o.payload);
  env.csv_columns = std::move(o.columns);
  env.csv_rows = std::move(o.rows);
  return env;
}

void write_outputs(const RunConfig& config, const ResultEnvelope& env) {
  const io::Series series{env.csv_columns, env.csv_rows};
  if (auto it = config.params.find("csv"); it != config.params.end()) io::emit_csv(series, it->second);
  const std::string text = config.format == "csv" ? io::csv_text(series) : env.to_json().dump(2) + "\n";
  if (config.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(config.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + config.out + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + config.out + "' failed");
}

}  // namespace teichlab
