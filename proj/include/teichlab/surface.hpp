#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "teichlab/iet.hpp"

namespace teichlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 rotated(Vec2 v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Polygon {
  std::vector<Vec2> vertices;  // counterclockwise
  std::size_t size() const noexcept { return vertices.size(); }
  Vec2 edge(std::size_t e) const { return vertices[(e + 1) % size()] - vertices[e]; }
  double signed_area() const;
};

struct EdgeRef {
  int polygon = 0;
  int edge = 0;
  bool operator==(const EdgeRef&) const = default;
};

struct Gluing {
  EdgeRef a;
  EdgeRef b;
};

struct SurfaceReport {
  int genus = 0;
  std::vector<int> stratum;           // zero orders m, descending (cone angle 2 pi (m+1))
  int marked_points = 0;              // vertex classes of angle 2 pi
  double area = 0.0;
  std::vector<double> cone_angles;    // per vertex class
};

// Planar polygons glued edge-to-edge by translations. Construct through
// make_surface(), which validates; the derived tables are then immutable.
class TranslationSurface {
 public:
  const std::vector<Polygon>& polygons() const noexcept { return polygons_; }
  const std::vector<Gluing>& gluings() const noexcept { return gluings_; }
  const Polygon& polygon(int p) const { return polygons_[static_cast<std::size_t>(p)]; }
  EdgeRef partner(EdgeRef e) const { return partner_[idx(e)]; }
  // Translation carrying points of edge e onto its partner.
  Vec2 shift(EdgeRef e) const { return shift_[idx(e)]; }
  int vertex_class(int polygon, int corner) const { return vclass_[static_cast<std::size_t>(polygon)][static_cast<std::size_t>(corner)]; }
  bool is_cone_class(int cls) const { return report_.cone_angles[static_cast<std::size_t>(cls)] > 2.0 * M_PI + 1e-9; }
  bool has_cone_points() const noexcept { return !report_.stratum.empty(); }
  const SurfaceReport& report() const noexcept { return report_; }
  int genus() const noexcept { return report_.genus; }
  double area() const noexcept { return report_.area; }
  // Linear factor applied by normalization (1 if never normalized).
  double original_scale() const noexcept { return original_scale_; }
  double diameter_bound() const;

  friend TranslationSurface make_surface(std::vector<Polygon>, std::vector<Gluing>);
  friend TranslationSurface normalized(const TranslationSurface&);

 private:
  std::size_t idx(EdgeRef e) const { return offsets_[static_cast<std::size_t>(e.polygon)] + static_cast<std::size_t>(e.edge); }

  std::vector<Polygon> polygons_;
  std::vector<Gluing> gluings_;
  std::vector<std::size_t> offsets_;
  std::vector<EdgeRef> partner_;
  std::vector<Vec2> shift_;
  std::vector<std::vector<int>> vclass_;
  SurfaceReport report_;
  double original_scale_ = 1.0;
};

// Validates and builds the derived tables. Throws ValidationError naming the
// first violated invariant.
TranslationSurface make_surface(std::vector<Polygon> polygons, std::vector<Gluing> gluings);

SurfaceReport validate(const TranslationSurface& s);

// Uniformly rescaled to unit area; the factor is kept as metadata.
TranslationSurface normalized(const TranslationSurface& s);

TranslationSurface rotate(const TranslationSurface& s, double theta);

enum class CatalogSurface { Torus, Octagon, LShape, H11Model };

struct CatalogParams {
  double a = 2.0;  // L-shape horizontal arm length
  double b = 3.0;  // L-shape vertical arm height
};

// Fixture surfaces, area-normalized.
TranslationSurface build_catalog(CatalogSurface which, const CatalogParams& params = {});
CatalogSurface catalog_from_name(const std::string& name);

// ------------------------------------------------------------------- flows

struct FlowPoint {
  int polygon = 0;
  Vec2 position;
};

struct Segment {
  int polygon = 0;
  Vec2 start;
  Vec2 end;
  double length() const { return (end - start).norm(); }
};

struct Crossing {
  EdgeRef edge;
  Vec2 translation;
};

struct Trajectory {
  double theta = 0.0;
  std::vector<Segment> segments;
  std::vector<Crossing> crossings;
  double total_length = 0.0;
  FlowPoint end_point() const { return {segments.back().polygon, segments.back().end}; }
};

inline constexpr double kVertexTube = 1e-12;

// Straight-line flow in direction theta for arc length T. Throws
// SingularityHit when the ray passes within 1e-12 of any polygon vertex.
Trajectory flow(const TranslationSurface& s, const FlowPoint& p, double theta, double T);

// --------------------------------------------------------- first return

struct Transversal {
  int polygon = 0;
  Vec2 a;
  Vec2 b;
  double length() const { return (b - a).norm(); }
  Vec2 at(double s) const { return a + (b - a) * (s / length()); }
};

struct FirstReturnConfig {
  int samples = 4096;
  double max_return = 0.0;  // 0: 1e3 * diameter bound
  int verify_points = 100;
  std::uint64_t verify_seed = 7;
};

struct FirstReturn {
  Iet iet;                       // arc-length parametrized; top = domain order
  std::vector<double> heights;   // return time per label
  double return_map_check = 0.0; // max |direct return - apply| over sampled points
};

// Direct return of the point at arc length `s` along the transversal:
// (arc length of the landing point, return time).
std::pair<double, double> transversal_return(const TranslationSurface& surf, double theta,
                                             const Transversal& tr, double s, double max_time);

FirstReturn first_return_iet(const TranslationSurface& s, double theta, const Transversal& tr,
                             const FirstReturnConfig& cfg = {});

// Length of the shortest saddle connection not longer than `bound`, or +inf.
// With no cone points (torus) the marked vertices are used, i.e. the systole.
double shortest_saddle_connection(const TranslationSurface& s, double bound);

// ------------------------------------------------------ zippered rectangles

// Heights h = -Omega tau of suspension data tau.
std::vector<double> suspension_heights(const Permutation& perm, const std::vector<double>& tau);

// Top partial sums of tau positive and bottom partial sums negative.
bool is_suspension_data(const Permutation& perm, const std::vector<double>& tau);

// Suspension data around tau_a = pos_bottom(a) - pos_top(a) with independent
// multipliers uniform in [0.5, 1.5] (rejection sampled).
std::vector<double> sample_suspension_data(const Permutation& perm, Rng& rng);

// Polygon with top broken line sum of (lambda, tau) in top order and bottom
// line in bottom order, sides labeled alike glued. Not normalized.
TranslationSurface zippered_surface(const Iet& iet, const std::vector<double>& tau);

}  // namespace teichlab
