#include "teichlab/cocycle.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "teichlab/errors.hpp"
#include "teichlab/kernels.hpp"

namespace teichlab {

Eigen::MatrixXd OmegaForm::to_dense() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j);
  return m;
}

int integer_rank(const std::vector<int>& m, std::size_t rows, std::size_t cols) {
  using boost::multiprecision::cpp_int;
  std::vector<cpp_int> a(m.begin(), m.end());
  int rank = 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(a[r * cols + j], a[p * cols + j]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const cpp_int f = a[i * cols + c];
      if (f == 0) continue;
      const cpp_int piv = a[r * cols + c];
      for (std::size_t j = 0; j < cols; ++j) a[i * cols + j] = a[i * cols + j] * piv - a[r * cols + j] * f;
    }
    ++r;
    ++rank;
  }
  return rank;
}

OmegaForm omega(const Permutation& perm) {
  const std::size_t d = perm.size();
  OmegaForm om{d, std::vector<int>(d * d, 0), 0};
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const int ta = perm.top_position(static_cast<Label>(a));
      const int tb = perm.top_position(static_cast<Label>(b));
      const int ba = perm.bottom_position(static_cast<Label>(a));
      const int bb = perm.bottom_position(static_cast<Label>(b));
      if (ta < tb && ba > bb) om.matrix[a * d + b] = 1;
      else if (ta > tb && ba < bb) om.matrix[a * d + b] = -1;
    }
  }
  om.rank = integer_rank(om.matrix, d, d);
  return om;
}

Permutation stratum_permutation(std::string_view name) {
  if (name == "torus") return Permutation::rotation_class(2);
  if (name == "h2") return Permutation::rotation_class(4);
  if (name == "h11") return Permutation::rotation_class(5);
  throw ValidationError("unknown stratum '" + std::string(name) + "' (expected torus, h2, h11)");
}

double symplectic_pairing(const OmegaForm& om, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Eigen::MatrixXd w = om.to_dense();
  const Eigen::VectorXd a = w.completeOrthogonalDecomposition().solve(u);
  return a.dot(v);
}

Eigen::MatrixXd image_basis(const OmegaForm& om) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(om.to_dense(), Eigen::ComputeFullU);
  return svd.matrixU().leftCols(om.rank);
}

Eigen::VectorXd mgs_orthonormalize(Eigen::MatrixXd& frame) {
  const Eigen::Index k = frame.cols();
  Eigen::VectorXd logs(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double r = frame.col(i).dot(frame.col(j));
      frame.col(j) -= r * frame.col(i);
    }
    const double n = frame.col(j).norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ConvergenceError("frame collapsed during re-orthonormalization");
    frame.col(j) /= n;
    logs(j) = std::log(n);
  }
  return logs;
}

double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  const double smin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

// --------------------------------------------------------------- CocycleFrame

namespace {

using PermKey = std::pair<std::vector<Label>, std::vector<Label>>;

// Projectors onto Im(Omega_pi); the Rauzy class is small so a per-frame cache
// is enough.
thread_local std::map<PermKey, Eigen::MatrixXd> tl_projectors;

Eigen::MatrixXd random_frame(std::size_t d, std::size_t k, Rng& rng) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, j) = uniform(rng, -1.0, 1.0);
  return f;
}

void apply_transpose_inplace(const VisitationMatrix& m, Eigen::MatrixXd& frame) {
  const std::size_t d = m.size();
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      dense(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = static_cast<double>(m(i, j));
  frame = dense * frame;
}

void apply_inplace(const VisitationMatrix& m, Eigen::MatrixXd& frame) {
  const std::size_t d = m.size();
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(m(i, j));
  frame = dense * frame;
}

// Largest entry of a pending product before it is folded into the frame; keeps
// the condition number of each applied block near 1e7.
constexpr std::uint64_t kAbsorbEntry = 4096;

std::uint64_t max_entry(const VisitationMatrix& m) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) r = std::max(r, m(i, j));
  return r;
}

}  // namespace

CocycleFrame::CocycleFrame(const Iet& start, std::size_t columns, Rng& rng)
    : iet_(start), pending_(start.size()), start_time_(start.log_scale) {
  frame_ = projector() * random_frame(start.size(), columns, rng);
  mgs_orthonormalize(frame_);
  log_norms_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(columns));
}

const Eigen::MatrixXd& CocycleFrame::projector() {
  PermKey key{iet_.perm.top(), iet_.perm.bottom()};
  auto it = tl_projectors.find(key);
  if (it == tl_projectors.end()) {
    const Eigen::MatrixXd u = image_basis(omega(iet_.perm));
    it = tl_projectors.emplace(std::move(key), u * u.transpose()).first;
  }
  return it->second;
}

std::uint64_t CocycleFrame::advance(const IetConfig& cfg) {
  VisitationMatrix b;
  const std::uint64_t count = zorich_step_inplace(iet_, b, cfg);
  if (max_entry(b) > kAbsorbEntry) {
    // A long run: B = I + N with N^2 = 0, applied as (I + N/k)^k so that no
    // single factor destroys the smaller frame directions.
    absorb();
    const std::size_t d = b.size();
    const auto k = static_cast<double>((max_entry(b) + kAbsorbEntry - 1) / kAbsorbEntry);
    Eigen::MatrixXd step = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (i != j) step(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = static_cast<double>(b(i, j)) / k;
    for (double r = 0; r < k; ++r) {
      frame_ = step * frame_;
      log_norms_ += mgs_orthonormalize(frame_);
    }
  } else {
    try {
      pending_ = pending_ * b;
    } catch (const OverflowError&) {
      flush();
      pending_ = b;
    }
    if (max_entry(pending_) > kAbsorbEntry) absorb();
  }
  ++steps_;
  return count;
}

void CocycleFrame::absorb() {
  if (pending_.is_identity()) return;
  flush();
  log_norms_ += mgs_orthonormalize(frame_);
}

void CocycleFrame::flush() {
  if (pending_.is_identity()) return;
  apply_transpose_inplace(pending_, frame_);
  pending_ = VisitationMatrix(iet_.size());
}

void CocycleFrame::renormalize() {
  flush();
  frame_ = projector() * frame_;
  log_norms_ += mgs_orthonormalize(frame_);
}

// -------------------------------------------------------------- kz_exponents

namespace {

struct BlockRecord {
  std::vector<Eigen::VectorXd> dlog;
  std::vector<double> dt;
  Eigen::VectorXd total_log;
  double total_time = 0.0;
  double raw_top_half = 0.0;
};

BlockRecord run_blocks(const Iet& seed_iet, const KzConfig& cfg, std::uint64_t frame_seed) {
  if (cfg.steps < 1) throw ValidationError("steps must be positive");
  if (cfg.qr_period < 1 || cfg.qr_period > 100) throw ValidationError("qr_period must lie in [1, 100]");
  if (!seed_iet.perm.is_irreducible()) throw ReducibleError("permutation is reducible");
  seed_iet.check();
  const OmegaForm om = omega(seed_iet.perm);
  Rng rng(frame_seed);
  CocycleFrame frame(seed_iet, static_cast<std::size_t>(om.rank), rng);

  const std::size_t nblocks = std::max<std::size_t>(1, std::min<std::size_t>(cfg.blocks, cfg.steps));
  BlockRecord rec;
  Eigen::VectorXd last_log = Eigen::VectorXd::Zero(om.rank);
  double last_time = 0.0;
  std::size_t block = 0;
  const std::uint64_t half = cfg.steps / 2;
  for (std::uint64_t s = 1; s <= cfg.steps; ++s) {
    frame.advance(cfg.iet);
    const std::uint64_t block_end = (cfg.steps * (block + 1)) / nblocks;
    const bool at_block_end = (s == block_end);
    if (s % static_cast<std::uint64_t>(cfg.qr_period) == 0 || at_block_end || s == half) {
      frame.renormalize();
    }
    if (s == half && frame.teich_time() > 0.0) {
      rec.raw_top_half = frame.log_norms()(0) / frame.teich_time();
    }
    if (at_block_end) {
      rec.dlog.push_back(frame.log_norms() - last_log);
      rec.dt.push_back(frame.teich_time() - last_time);
      last_log = frame.log_norms();
      last_time = frame.teich_time();
      ++block;
    }
  }
  rec.total_log = frame.log_norms();
  rec.total_time = frame.teich_time();
  return rec;
}

ExponentEstimate pool(const std::vector<BlockRecord>& recs, const KzConfig& cfg,
                      std::vector<std::uint64_t> seeds) {
  const Eigen::Index k = recs.front().total_log.size();
  Eigen::VectorXd total = Eigen::VectorXd::Zero(k);
  double time = 0.0;
  std::vector<const Eigen::VectorXd*> dlog;
  std::vector<double> dt;
  for (const auto& r : recs) {
    total += r.total_log;
    time += r.total_time;
    for (std::size_t b = 0; b < r.dt.size(); ++b) {
      dlog.push_back(&r.dlog[b]);
      dt.push_back(r.dt[b]);
    }
  }
  ExponentEstimate est;
  est.steps = cfg.steps;
  est.teich_time = time;
  est.seeds = std::move(seeds);
  est.raw_top_half = 0.0;
  for (const auto& r : recs) est.raw_top_half += r.raw_top_half / static_cast<double>(recs.size());

  Eigen::VectorXd raw = total / time;
  std::vector<double> rawv(raw.data(), raw.data() + k);
  std::sort(rawv.begin(), rawv.end(), std::greater<>());
  est.raw = rawv;
  for (double r : rawv) est.lambdas.push_back(r / rawv[0]);
  est.lambdas[0] = 1.0;

  // Block bootstrap of the normalized ratio estimator.
  Rng rng(derive_seed(cfg.seed, 0xB0075781ULL));
  const std::size_t nb = dt.size();
  std::vector<double> sum(static_cast<std::size_t>(k), 0.0), sumsq(static_cast<std::size_t>(k), 0.0);
  const int reps = std::max(2, cfg.bootstrap_replicates);
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::VectorXd l = Eigen::VectorXd::Zero(k);
    double t = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      const std::size_t pick = static_cast<std::size_t>(rng() % nb);
      l += *dlog[pick];
      t += dt[pick];
    }
    std::vector<double> v(l.data(), l.data() + k);
    for (auto& x : v) x /= t;
    std::sort(v.begin(), v.end(), std::greater<>());
    for (Eigen::Index i = 0; i < k; ++i) {
      const double lam = v[static_cast<std::size_t>(i)] / v[0];
      sum[static_cast<std::size_t>(i)] += lam;
      sumsq[static_cast<std::size_t>(i)] += lam * lam;
    }
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    const double m = sum[static_cast<std::size_t>(i)] / reps;
    const double var = std::max(0.0, sumsq[static_cast<std::size_t>(i)] / reps - m * m) * reps / (reps - 1);
    est.stderr_.push_back(std::sqrt(var));
  }
  est.stderr_[0] = 0.0;
  return est;
}

}  // namespace

ExponentEstimate kz_exponents(const Iet& seed_iet, const KzConfig& cfg) {
  std::vector<BlockRecord> recs{run_blocks(seed_iet, cfg, derive_seed(cfg.seed, 1))};
  return pool(recs, cfg, {cfg.seed});
}

ExponentEstimate kz_exponents(const Permutation& perm, const KzConfig& cfg, int seeds) {
  if (seeds < 1) throw ValidationError("need at least one seed");
  std::vector<std::uint64_t> sub(static_cast<std::size_t>(seeds));
  for (int k = 0; k < seeds; ++k) sub[static_cast<std::size_t>(k)] = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(k));
  std::vector<BlockRecord> recs = kernels::omp::map_seeds<BlockRecord>(sub, [&](std::uint64_t s) {
    Rng rng(s);
    const Iet start = random_iet(perm, rng);
    return run_blocks(start, cfg, derive_seed(s, 1));
  });
  return pool(recs, cfg, sub);
}

SpectrumReport spectrum_checks(const ExponentEstimate& est) {
  SpectrumReport rep;
  const std::size_t n = est.lambdas.size();
  const int g = est.genus();
  rep.symmetry = true;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double s = est.lambdas[i] + est.lambdas[j];
    rep.pair_sums.push_back(s);
    // Floor at the estimator's rounding level: on the torus the pair is
    // exactly antisymmetric blockwise and the bootstrap error vanishes.
    const double se = std::max(std::hypot(est.stderr_[i], est.stderr_[j]), 1e-9);
    if (!(std::abs(s) < 3.0 * se)) rep.symmetry = false;
  }
  if (g <= 1) {
    rep.gap_vacuous = rep.hyperbolic_vacuous = true;
    rep.gap = rep.hyperbolic = true;
    return rep;
  }
  rep.gap = est.lambdas[1] < 1.0 - 3.0 * est.stderr_[1];
  const auto gi = static_cast<std::size_t>(g - 1);
  rep.hyperbolic = est.lambdas[gi] > 3.0 * est.stderr_[gi];
  return rep;
}

// ---------------------------------------------------------- oseledec_subspaces

namespace {

Eigen::MatrixXd forward_unstable(const Iet& start, std::uint64_t steps, std::size_t g,
                                 std::uint64_t seed, const IetConfig& cfg, Iet* end) {
  Rng rng(seed);
  CocycleFrame frame(start, g, rng);
  for (std::uint64_t s = 1; s <= steps; ++s) {
    frame.advance(cfg);
    if (s % 10 == 0 || s == steps) frame.renormalize();
  }
  if (end) *end = frame.iet();
  return frame.vectors();
}

// Range of B_1 ... B_n on a (d-g)-frame, applied from B_n down to B_1.
Eigen::MatrixXd reversed_range(const std::vector<VisitationMatrix>& path, std::size_t n,
                               std::size_t cols, Rng& rng) {
  const std::size_t d = path.front().size();
  Eigen::MatrixXd w = random_frame(d, cols, rng);
  mgs_orthonormalize(w);
  for (std::size_t k = n; k-- > 0;) {
    apply_inplace(path[k], w);
    if (k % 10 == 0) mgs_orthonormalize(w);
  }
  mgs_orthonormalize(w);
  return w;
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& w) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(w.rows() - w.cols());
}

}  // namespace

OseledecSplitting oseledec_subspaces(const Iet& seed_iet, std::uint64_t steps,
                                     std::uint64_t frame_seed, const IetConfig& cfg) {
  if (steps < 2) throw ValidationError("need at least 2 steps");
  const OmegaForm om0 = omega(seed_iet.perm);
  const std::size_t g = static_cast<std::size_t>(om0.genus());
  const std::size_t d = seed_iet.size();

  OseledecSplitting out;
  Eigen::MatrixXd plus = forward_unstable(seed_iet, steps, g, derive_seed(frame_seed, 11), cfg, &out.base);
  // Checkpoint: a frame that only saw the second half of the burn-in.
  {
    Iet mid = seed_iet;
    VisitationMatrix scratch;
    for (std::uint64_t s = 0; s < steps / 2; ++s) zorich_step_inplace(mid, scratch, cfg);
    const Eigen::MatrixXd plus_half =
        forward_unstable(mid, steps - steps / 2, g, derive_seed(frame_seed, 12), cfg, nullptr);
    out.plus_drift = subspace_distance(plus, plus_half);
  }

  std::vector<VisitationMatrix> path;
  path.reserve(steps);
  Iet walker = out.base;
  for (std::uint64_t s = 0; s < steps; ++s) {
    VisitationMatrix b;
    zorich_step_inplace(walker, b, cfg);
    path.push_back(std::move(b));
  }
  Rng rng(derive_seed(frame_seed, 13));
  const Eigen::MatrixXd top = reversed_range(path, path.size(), d - g, rng);
  const Eigen::MatrixXd top_half = reversed_range(path, path.size() / 2, d - g, rng);
  out.e_minus = orthogonal_complement(top);
  out.minus_drift = subspace_distance(out.e_minus, orthogonal_complement(top_half));

  if (out.plus_drift > 1e-3 || out.minus_drift > 1e-3) {
    throw ConvergenceError("Oseledets subspace estimates moved by more than 1e-3 between checkpoints");
  }

  // Re-base E+ so that columns 1.. span E+ intersected with lengths^perp.
  Eigen::VectorXd lam(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) lam(static_cast<Eigen::Index>(i)) = out.base.lengths[i];
  Eigen::VectorXd c = plus.transpose() * lam;
  c.normalize();
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g));
  coords.col(0) = c;
  if (g > 1) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU);
    coords.rightCols(static_cast<Eigen::Index>(g - 1)) = svd.matrixU().rightCols(static_cast<Eigen::Index>(g - 1));
  }
  out.e_plus = plus * coords;
  return out;
}

}  // namespace teichlab
