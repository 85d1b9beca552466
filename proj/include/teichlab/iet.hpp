#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "teichlab/random.hpp"

namespace teichlab {

using Label = int;

// A pair of orderings of the alphabet {0, ..., d-1}. `top[i]` is the label of
// the i-th interval of the domain, `bottom[i]` the i-th interval of the image.
class Permutation {
 public:
  Permutation() = default;
  Permutation(std::vector<Label> top, std::vector<Label> bottom,
              std::vector<std::string> names = {});

  // Builds from symbol names, e.g. ({"A","B"}, {"B","A"}). Labels are assigned
  // in order of first appearance on the top row.
  static Permutation from_names(const std::vector<std::string>& top,
                                const std::vector<std::string>& bottom);

  // The symmetric permutation (0,...,d-1)/(d-1,...,0) with names A, B, ...
  static Permutation rotation_class(std::size_t d);

  std::size_t size() const noexcept { return top_.size(); }
  const std::vector<Label>& top() const noexcept { return top_; }
  const std::vector<Label>& bottom() const noexcept { return bottom_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  int top_position(Label a) const { return top_pos_[static_cast<std::size_t>(a)]; }
  int bottom_position(Label a) const { return bottom_pos_[static_cast<std::size_t>(a)]; }

  // No proper prefix of the top row is set-equal to the same-length prefix of
  // the bottom row.
  bool is_irreducible() const;

  // Moves `loser` to sit immediately after `winner` on the given row.
  void move_after_on_top(Label loser, Label winner);
  void move_after_on_bottom(Label loser, Label winner);

  bool operator==(const Permutation& o) const {
    return top_ == o.top_ && bottom_ == o.bottom_;
  }

 private:
  void reindex();

  std::vector<Label> top_;
  std::vector<Label> bottom_;
  std::vector<int> top_pos_;
  std::vector<int> bottom_pos_;
  std::vector<std::string> names_;
};

// Square nonnegative-integer matrix with overflow-checked products. Row
// index = old interval, column index = new interval: lengths_old = M *
// lengths_new, and M(i, j) counts visits of new interval j to old interval i
// before its first return.
class VisitationMatrix {
 public:
  VisitationMatrix() = default;
  explicit VisitationMatrix(std::size_t d);  // identity
  static VisitationMatrix identity(std::size_t d) { return VisitationMatrix(d); }
  static VisitationMatrix elementary(std::size_t d, Label winner, Label loser);

  std::size_t size() const noexcept { return d_; }
  std::uint64_t operator()(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }
  std::uint64_t& operator()(std::size_t i, std::size_t j) { return a_[i * d_ + j]; }
  std::uint64_t steps() const noexcept { return steps_; }
  void set_steps(std::uint64_t s) noexcept { steps_ = s; }

  // this * rhs; throws OverflowError on any 64-bit overflow.
  VisitationMatrix operator*(const VisitationMatrix& rhs) const;
  bool operator==(const VisitationMatrix& o) const { return d_ == o.d_ && a_ == o.a_; }

  // Exact integer determinant (multiprecision Bareiss elimination).
  std::int64_t determinant() const;

  // y = M x, y = M^T x in double precision.
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> x) const;

  bool is_identity() const;

 private:
  std::size_t d_ = 0;
  std::uint64_t steps_ = 0;
  std::vector<std::uint64_t> a_;
};

enum class RauzyKind { Top, Bottom };

struct RauzyStep {
  RauzyKind kind;
  Label winner;
  Label loser;
  VisitationMatrix elementary_matrix;
};

// Labeled interval exchange. `lengths` is indexed by label. `log_scale` is the
// accumulated -log of total-length renormalizations (a discrete Teichmueller
// time).
struct Iet {
  Permutation perm;
  std::vector<double> lengths;
  double log_scale = 0.0;

  std::size_t size() const noexcept { return perm.size(); }
  double total_length() const;
  // Left endpoints of the domain intervals, in top order (d+1 entries).
  std::vector<double> domain_breaks() const;
  // Signed translation of each label's interval.
  std::vector<double> translations() const;
  // Throws ValidationError when lengths are not strictly positive or the sizes
  // disagree.
  void check() const;
};

struct IetConfig {
  double tie_tolerance = 1e-14;       // relative to the total length
  std::uint64_t zorich_cap = 1'000'000'000'000;
};

struct ZorichStep {
  Iet iet;                  // renormalized to total length 1
  VisitationMatrix matrix;  // product of the elementary matrices, in order
  std::uint64_t count = 0;
  RauzyKind kind = RauzyKind::Top;
  double log_factor = 0.0;  // -log of the total length before renormalizing
};

// Which side wins the next Rauzy move. Throws TieError on a tie.
RauzyKind rauzy_kind(const Iet& iet, const IetConfig& cfg = {});

// One Rauzy-Veech move; lengths are left un-normalized.
std::pair<Iet, RauzyStep> rauzy_step(const Iet& iet, const IetConfig& cfg = {});

// A maximal run of Rauzy moves of constant kind, then renormalization.
ZorichStep zorich_step(const Iet& iet, const IetConfig& cfg = {});

// In-place variant used by the long renormalization loops. `matrix` receives
// the run's visitation matrix; returns the run length.
std::uint64_t zorich_step_inplace(Iet& iet, VisitationMatrix& matrix,
                                  const IetConfig& cfg = {}, RauzyKind* kind = nullptr,
                                  double* log_factor = nullptr);

// Evaluates the exchange; throws BoundaryError within 1e-14 of an interior
// discontinuity (or outside the domain).
double apply(const Iet& iet, double x);
double apply_inverse(const Iet& iet, double x);

// Index (label) of the domain interval containing x, right-continuous.
Label letter_at(const Iet& iet, double x);

// No forward orbit of an interior discontinuity hits an interior
// discontinuity within n iterates (tolerance 1e-12).
bool keane_check(const Iet& iet, int n);

// Precomputed breakpoints/translations for tight orbit loops.
class ExchangeMap {
 public:
  explicit ExchangeMap(const Iet& iet);
  std::size_t size() const noexcept { return labels_.size(); }
  double total() const noexcept { return breaks_.back(); }
  // Position in top order of the interval containing x (right-continuous).
  std::size_t slot(double x) const noexcept {
    std::size_t j = 0;
    while (j + 1 < labels_.size() && x >= breaks_[j + 1]) ++j;
    return j;
  }
  Label label_of_slot(std::size_t j) const noexcept { return labels_[j]; }
  // Distance from x to the nearest interior discontinuity.
  double boundary_distance(double x) const noexcept;
  double map_slot(double x, std::size_t j) const noexcept;
  double operator()(double x) const noexcept { return map_slot(x, slot(x)); }
  const std::vector<double>& breaks() const noexcept { return breaks_; }

 private:
  std::vector<double> breaks_;
  std::vector<double> shift_;  // by top slot
  std::vector<Label> labels_;
};

// Lengths uniform on the simplex for the given combinatorics.
Iet random_iet(const Permutation& perm, Rng& rng);

}  // namespace teichlab
