#include "teichlab/iet.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numeric>
#include <set>

#include "teichlab/errors.hpp"

namespace teichlab {

std::vector<double> uniform_simplex(Rng& rng, std::size_t d) {
  std::vector<double> x(d);
  double sum = 0.0;
  for (auto& v : x) {
    // 1 - u lies in (0, 1], so the logarithm is finite.
    v = -std::log(1.0 - uniform01(rng));
    sum += v;
  }
  for (auto& v : x) v /= sum;
  return x;
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<Label> top, std::vector<Label> bottom,
                         std::vector<std::string> names)
    : top_(std::move(top)), bottom_(std::move(bottom)), names_(std::move(names)) {
  const std::size_t d = top_.size();
  if (d < 2) throw ValidationError("permutation needs at least 2 labels");
  if (bottom_.size() != d) throw ValidationError("top and bottom rows differ in length");
  std::vector<Label> a = top_, b = bottom_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] != static_cast<Label>(i) || b[i] != static_cast<Label>(i))
      throw ValidationError("rows must be permutations of the same label set");
  }
  if (names_.empty()) {
    for (std::size_t i = 0; i < d; ++i) {
      names_.push_back(i < 26 ? std::string(1, static_cast<char>('A' + i))
                              : "L" + std::to_string(i));
    }
  }
  if (names_.size() != d) throw ValidationError("label name count mismatch");
  reindex();
}

Permutation Permutation::from_names(const std::vector<std::string>& top,
                                    const std::vector<std::string>& bottom) {
  std::vector<std::string> names = top;
  std::set<std::string> seen(top.begin(), top.end());
  if (seen.size() != top.size()) throw ValidationError("duplicate label on top row");
  std::vector<Label> t(top.size()), b;
  std::iota(t.begin(), t.end(), 0);
  for (const auto& n : bottom) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw ValidationError("bottom label '" + n + "' missing on top");
    b.push_back(static_cast<Label>(it - names.begin()));
  }
  return Permutation(std::move(t), std::move(b), std::move(names));
}

Permutation Permutation::rotation_class(std::size_t d) {
  std::vector<Label> t(d), b(d);
  std::iota(t.begin(), t.end(), 0);
  std::reverse_copy(t.begin(), t.end(), b.begin());
  return Permutation(std::move(t), std::move(b));
}

void Permutation::reindex() {
  const std::size_t d = top_.size();
  top_pos_.assign(d, 0);
  bottom_pos_.assign(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    top_pos_[static_cast<std::size_t>(top_[i])] = static_cast<int>(i);
    bottom_pos_[static_cast<std::size_t>(bottom_[i])] = static_cast<int>(i);
  }
}

bool Permutation::is_irreducible() const {
  // Prefix of length k is set-equal iff max top position among the first k
  // bottom labels is k-1.
  const std::size_t d = size();
  int max_pos = -1;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    max_pos = std::max(max_pos, top_position(bottom_[k]));
    if (max_pos == static_cast<int>(k)) return false;
  }
  return true;
}

namespace {
void move_after(std::vector<Label>& row, Label loser, Label winner) {
  row.erase(std::find(row.begin(), row.end(), loser));
  row.insert(std::find(row.begin(), row.end(), winner) + 1, loser);
}
}  // namespace

void Permutation::move_after_on_top(Label loser, Label winner) {
  move_after(top_, loser, winner);
  reindex();
}

void Permutation::move_after_on_bottom(Label loser, Label winner) {
  move_after(bottom_, loser, winner);
  reindex();
}

// ----------------------------------------------------------- VisitationMatrix

VisitationMatrix::VisitationMatrix(std::size_t d) : d_(d), a_(d * d, 0) {
  for (std::size_t i = 0; i < d; ++i) a_[i * d + i] = 1;
}

VisitationMatrix VisitationMatrix::elementary(std::size_t d, Label winner, Label loser) {
  VisitationMatrix m(d);
  m(static_cast<std::size_t>(winner), static_cast<std::size_t>(loser)) = 1;
  m.steps_ = 1;
  return m;
}

VisitationMatrix VisitationMatrix::operator*(const VisitationMatrix& rhs) const {
  if (rhs.d_ != d_) throw ValidationError("visitation matrix size mismatch");
  VisitationMatrix out(d_);
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t j = 0; j < d_; ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < d_; ++k) {
        std::uint64_t term = 0;
        if (__builtin_mul_overflow(a_[i * d_ + k], rhs.a_[k * d_ + j], &term) ||
            __builtin_add_overflow(acc, term, &acc)) {
          throw OverflowError("visitation matrix entry exceeds 64 bits");
        }
      }
      out.a_[i * d_ + j] = acc;
    }
  }
  out.steps_ = steps_ + rhs.steps_;
  return out;
}

std::int64_t VisitationMatrix::determinant() const {
  using boost::multiprecision::cpp_int;
  const std::size_t n = d_;
  std::vector<cpp_int> m(a_.begin(), a_.end());
  cpp_int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k * n + k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p * n + k] == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
      }
    }
    prev = m[k * n + k];
  }
  cpp_int det = m[n * n - 1] * sign;
  return det.convert_to<std::int64_t>();
}

std::vector<double> VisitationMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(d_, 0.0);
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j) y[i] += static_cast<double>(a_[i * d_ + j]) * x[j];
  return y;
}

std::vector<double> VisitationMatrix::apply_transpose(std::span<const double> x) const {
  std::vector<double> y(d_, 0.0);
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j) y[j] += static_cast<double>(a_[i * d_ + j]) * x[i];
  return y;
}

bool VisitationMatrix::is_identity() const { return *this == VisitationMatrix(d_); }

// ------------------------------------------------------------------------ Iet

double Iet::total_length() const {
  return std::accumulate(lengths.begin(), lengths.end(), 0.0);
}

std::vector<double> Iet::domain_breaks() const {
  std::vector<double> b{0.0};
  for (Label a : perm.top()) b.push_back(b.back() + lengths[static_cast<std::size_t>(a)]);
  return b;
}

std::vector<double> Iet::translations() const {
  const std::size_t d = size();
  std::vector<double> dom(d), img(d);
  double acc = 0.0;
  for (Label a : perm.top()) {
    dom[static_cast<std::size_t>(a)] = acc;
    acc += lengths[static_cast<std::size_t>(a)];
  }
  acc = 0.0;
  for (Label a : perm.bottom()) {
    img[static_cast<std::size_t>(a)] = acc;
    acc += lengths[static_cast<std::size_t>(a)];
  }
  std::vector<double> t(d);
  for (std::size_t i = 0; i < d; ++i) t[i] = img[i] - dom[i];
  return t;
}

void Iet::check() const {
  if (lengths.size() != perm.size()) throw ValidationError("lengths/permutation size mismatch");
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("lengths must be positive");
  }
}

RauzyKind rauzy_kind(const Iet& iet, const IetConfig& cfg) {
  const double lt = iet.lengths[static_cast<std::size_t>(iet.perm.top().back())];
  const double lb = iet.lengths[static_cast<std::size_t>(iet.perm.bottom().back())];
  if (std::abs(lt - lb) <= cfg.tie_tolerance * iet.total_length()) {
    throw TieError("last top and bottom intervals have equal length (saddle connection)");
  }
  return lt > lb ? RauzyKind::Top : RauzyKind::Bottom;
}

namespace {

// Applies one move in place; returns (winner, loser).
std::pair<Label, Label> rauzy_move(Iet& iet, RauzyKind kind) {
  const Label t = iet.perm.top().back();
  const Label b = iet.perm.bottom().back();
  if (kind == RauzyKind::Top) {
    iet.lengths[static_cast<std::size_t>(t)] -= iet.lengths[static_cast<std::size_t>(b)];
    iet.perm.move_after_on_bottom(b, t);
    return {t, b};
  }
  iet.lengths[static_cast<std::size_t>(b)] -= iet.lengths[static_cast<std::size_t>(t)];
  iet.perm.move_after_on_top(t, b);
  return {b, t};
}

}  // namespace

std::pair<Iet, RauzyStep> rauzy_step(const Iet& iet, const IetConfig& cfg) {
  if (!iet.perm.is_irreducible()) throw ReducibleError("permutation is reducible");
  const RauzyKind kind = rauzy_kind(iet, cfg);
  Iet out = iet;
  auto [w, l] = rauzy_move(out, kind);
  return {std::move(out),
          RauzyStep{kind, w, l, VisitationMatrix::elementary(iet.size(), w, l)}};
}

std::uint64_t zorich_step_inplace(Iet& iet, VisitationMatrix& matrix, const IetConfig& cfg,
                                  RauzyKind* kind_out, double* log_factor) {
  const std::size_t d = iet.size();
  const RauzyKind kind = rauzy_kind(iet, cfg);
  // Within a run the winner is fixed, so the product of the elementary
  // matrices is I + e_winner * (loser counts)^T.
  std::vector<std::uint64_t> loser_count(d, 0);
  Label winner = -1;
  std::uint64_t count = 0;
  {
    // The losers of a run cycle through the letters after the winner on the
    // losing row; whole cycles are taken in one subtraction.
    const auto& perm = iet.perm;
    const Label w = kind == RauzyKind::Top ? perm.top().back() : perm.bottom().back();
    const auto& row = kind == RauzyKind::Top ? perm.bottom() : perm.top();
    const auto p = static_cast<std::size_t>(kind == RauzyKind::Top ? perm.bottom_position(w) : perm.top_position(w));
    double cycle = 0.0;
    for (std::size_t i = p + 1; i < d; ++i) cycle += iet.lengths[static_cast<std::size_t>(row[i])];
    double& lw = iet.lengths[static_cast<std::size_t>(w)];
    const double q = cycle > 0.0 ? std::floor(lw / cycle) : 0.0;
    if (q >= 2.0) {
      const double m = q - 1.0;
      if (m * static_cast<double>(d - 1 - p) >= static_cast<double>(cfg.zorich_cap))
        throw DivergenceError("Zorich run exceeded cap of " + std::to_string(cfg.zorich_cap) +
                              " steps (near-rational data)");
      const auto mi = static_cast<std::uint64_t>(m);
      lw -= m * cycle;
      for (std::size_t i = p + 1; i < d; ++i) loser_count[static_cast<std::size_t>(row[i])] += mi;
      count += mi * (d - 1 - p);
      winner = w;
    }
  }
  for (;;) {
    auto [w, l] = rauzy_move(iet, kind);
    winner = w;
    ++loser_count[static_cast<std::size_t>(l)];
    ++count;
    if (rauzy_kind(iet, cfg) != kind) break;
    if (count >= cfg.zorich_cap) {
      throw DivergenceError("Zorich run exceeded cap of " + std::to_string(cfg.zorich_cap) +
                            " steps (near-rational data)");
    }
  }
  matrix = VisitationMatrix(d);
  for (std::size_t j = 0; j < d; ++j) matrix(static_cast<std::size_t>(winner), j) += loser_count[j];
  matrix.set_steps(count);

  const double total = iet.total_length();
  for (auto& l : iet.lengths) l /= total;
  const double lf = -std::log(total);
  iet.log_scale += lf;
  if (kind_out) *kind_out = kind;
  if (log_factor) *log_factor = lf;
  return count;
}

ZorichStep zorich_step(const Iet& iet, const IetConfig& cfg) {
  if (!iet.perm.is_irreducible()) throw ReducibleError("permutation is reducible");
  ZorichStep z;
  z.iet = iet;
  z.count = zorich_step_inplace(z.iet, z.matrix, cfg, &z.kind, &z.log_factor);
  return z;
}

// --------------------------------------------------------------- ExchangeMap

ExchangeMap::ExchangeMap(const Iet& iet) {
  const auto t = iet.translations();
  breaks_ = iet.domain_breaks();
  for (Label a : iet.perm.top()) {
    labels_.push_back(a);
    shift_.push_back(t[static_cast<std::size_t>(a)]);
  }
}

double ExchangeMap::boundary_distance(double x) const noexcept {
  double best = INFINITY;
  for (std::size_t j = 1; j + 1 < breaks_.size(); ++j) best = std::min(best, std::abs(x - breaks_[j]));
  return best;
}

double ExchangeMap::map_slot(double x, std::size_t j) const noexcept {
  double y = x + shift_[j];
  // Rounding can push an image a hair outside the domain.
  if (y < 0.0) y = 0.0;
  const double top = total();
  if (y >= top) y = std::nextafter(top, 0.0);
  return y;
}

double apply(const Iet& iet, double x) {
  const ExchangeMap map(iet);
  if (!(x >= 0.0) || !(x < map.total())) throw BoundaryError("point outside the domain");
  if (map.boundary_distance(x) <= 1e-14) throw BoundaryError("point on a discontinuity");
  return map(x);
}

double apply_inverse(const Iet& iet, double y) {
  // The inverse exchange has the roles of the two rows swapped.
  Iet inv{Permutation(iet.perm.bottom(), iet.perm.top(), iet.perm.names()), iet.lengths, 0.0};
  return apply(inv, y);
}

Label letter_at(const Iet& iet, double x) {
  const ExchangeMap map(iet);
  return map.label_of_slot(map.slot(x));
}

bool keane_check(const Iet& iet, int n) {
  const ExchangeMap map(iet);
  const auto& br = map.breaks();
  for (std::size_t j = 1; j + 1 < br.size(); ++j) {
    double x = br[j];
    for (int k = 0; k < n; ++k) {
      x = map(x);
      if (map.boundary_distance(x) <= 1e-12) return false;
    }
  }
  return true;
}

Iet random_iet(const Permutation& perm, Rng& rng) {
  return Iet{perm, uniform_simplex(rng, perm.size()), 0.0};
}

}  // namespace teichlab
