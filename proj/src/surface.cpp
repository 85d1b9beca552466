#include "teichlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "teichlab/cocycle.hpp"
#include "teichlab/errors.hpp"

namespace teichlab {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::string edge_name(EdgeRef e) {
  return "(" + std::to_string(e.polygon) + "," + std::to_string(e.edge) + ")";
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const Vec2 r = p2 - p1, s = q2 - q1;
  const double den = r.cross(s);
  if (std::abs(den) < 1e-300) return false;
  const double t = (q1 - p1).cross(s) / den;
  const double u = (q1 - p1).cross(r) / den;
  constexpr double eps = 1e-12;
  return t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

double interior_angle(const Polygon& p, std::size_t i) {
  const std::size_t n = p.size();
  const Vec2 out = p.vertices[(i + 1) % n] - p.vertices[i];
  const Vec2 in = p.vertices[(i + n - 1) % n] - p.vertices[i];
  double a = std::atan2(out.cross(in), out.dot(in));
  if (a <= 0.0) a += kTwoPi;
  return a;
}

// Result of tracing one trajectory. A vertex hit carries the vertex class.
struct TraceResult {
  enum Status { Completed, VertexHit, HookHit, Stuck } status = Completed;
  double distance = 0.0;
  int vertex_class = -1;
};

struct NoHook {
  std::optional<double> operator()(int, Vec2, Vec2, double, double) const { return std::nullopt; }
};

// Core ray tracer. `hook(polygon, x, u, seg_len, travelled)` may return a
// parameter in [0, seg_len] at which the trajectory stops.
template <class Hook>
TraceResult trace(const TranslationSurface& s, FlowPoint p, Vec2 u, double T, Trajectory* out,
                  Hook&& hook) {
  TraceResult res;
  int poly = p.polygon;
  Vec2 x = p.position;
  double travelled = 0.0;
  const std::size_t guard = 100'000'000;
  for (std::size_t iter = 0; iter < guard; ++iter) {
    const Polygon& P = s.polygon(poly);
    const std::size_t n = P.size();
    // Exit edge: outgoing edge with the smallest nonnegative ray parameter.
    int exit_edge = -1;
    double t_exit = std::numeric_limits<double>::infinity();
    double sigma_exit = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      const Vec2 A = P.vertices[e];
      const Vec2 ev = P.edge(e);
      const double den = u.cross(ev);
      if (den <= 0.0) continue;
      const double t = (A - x).cross(ev) / den;
      const double sigma = (A - x).cross(u) / den;
      if (t < -1e-13 || sigma < -1e-9 || sigma > 1.0 + 1e-9) continue;
      if (t < t_exit) {
        t_exit = std::max(t, 0.0);
        exit_edge = static_cast<int>(e);
        sigma_exit = std::clamp(sigma, 0.0, 1.0);
      }
    }
    const double remaining = T - travelled;
    double seg = exit_edge < 0 ? remaining : std::min(t_exit, remaining);

    std::optional<double> stop = hook(poly, x, u, seg, travelled);
    if (stop) seg = *stop;

    for (std::size_t v = 0; v < n; ++v) {
      const Vec2 w = P.vertices[v] - x;
      const double tau = std::clamp(w.dot(u), 0.0, seg);
      if ((w - u * tau).norm() < kVertexTube) {
        res.status = TraceResult::VertexHit;
        res.distance = travelled + tau;
        res.vertex_class = s.vertex_class(poly, static_cast<int>(v));
        return res;
      }
    }

    const bool finishing = stop || exit_edge < 0 || remaining <= t_exit;
    if (finishing && !stop && exit_edge < 0 && remaining > 0.0) {
      res.status = TraceResult::Stuck;
      res.distance = travelled;
      return res;
    }
    Vec2 end = x + u * seg;
    if (!finishing) {
      end = P.vertices[static_cast<std::size_t>(exit_edge)] + P.edge(static_cast<std::size_t>(exit_edge)) * sigma_exit;
    }
    if (out) out->segments.push_back({poly, x, end});
    if (finishing) {
      res.status = stop ? TraceResult::HookHit : TraceResult::Completed;
      res.distance = travelled + seg;
      return res;
    }
    travelled += t_exit;
    const EdgeRef er{poly, exit_edge};
    const Vec2 sh = s.shift(er);
    if (out) out->crossings.push_back({er, sh});
    x = end + sh;
    poly = s.partner(er).polygon;
  }
  res.status = TraceResult::Stuck;
  res.distance = travelled;
  return res;
}

Vec2 direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace

double Polygon::signed_area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < size(); ++i) a += vertices[i].cross(vertices[(i + 1) % size()]);
  return 0.5 * a;
}

double TranslationSurface::diameter_bound() const {
  double total = 0.0;
  for (const auto& p : polygons_)
    for (std::size_t e = 0; e < p.size(); ++e) total += p.edge(e).norm();
  return total;
}

// ------------------------------------------------------------ construction

TranslationSurface make_surface(std::vector<Polygon> polygons, std::vector<Gluing> gluings) {
  if (polygons.empty()) throw ValidationError("surface has no polygons");
  TranslationSurface s;
  std::size_t total_edges = 0;
  for (std::size_t p = 0; p < polygons.size(); ++p) {
    const Polygon& P = polygons[p];
    if (P.size() < 3) throw ValidationError("polygon " + std::to_string(p) + " has fewer than 3 vertices");
    for (const Vec2& v : P.vertices)
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw ValidationError("polygon " + std::to_string(p) + " has a non-finite vertex");
    if (P.signed_area() <= 0.0)
      throw ValidationError("polygon " + std::to_string(p) + " is not counterclockwise with positive area");
    const std::size_t n = P.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (P.edge(i).norm() == 0.0)
        throw ValidationError("polygon " + std::to_string(p) + " has a degenerate edge");
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        if (segments_cross(P.vertices[i], P.vertices[(i + 1) % n], P.vertices[j], P.vertices[(j + 1) % n]))
          throw ValidationError("polygon " + std::to_string(p) + " is not simple");
      }
    }
    s.offsets_.push_back(total_edges);
    total_edges += n;
  }
  s.partner_.assign(total_edges, EdgeRef{-1, -1});
  s.shift_.assign(total_edges, Vec2{});

  auto check_ref = [&](EdgeRef e) {
    if (e.polygon < 0 || static_cast<std::size_t>(e.polygon) >= s.polygons_.size() || e.edge < 0 ||
        static_cast<std::size_t>(e.edge) >= s.polygons_[static_cast<std::size_t>(e.polygon)].size())
      throw ValidationError("gluing references nonexistent edge " + edge_name(e));
  };
  s.polygons_ = std::move(polygons);
  for (const Gluing& g : gluings) {
    check_ref(g.a);
    check_ref(g.b);
    if (g.a == g.b) throw ValidationError("edge " + edge_name(g.a) + " glued to itself");
    for (EdgeRef e : {g.a, g.b})
      if (s.partner_[s.idx(e)].polygon >= 0) throw ValidationError("edge " + edge_name(e) + " glued more than once");
    const Vec2 va = s.polygon(g.a.polygon).edge(static_cast<std::size_t>(g.a.edge));
    const Vec2 vb = s.polygon(g.b.polygon).edge(static_cast<std::size_t>(g.b.edge));
    const double tol = 1e-12 * std::max(1.0, va.norm());
    if ((va + vb).norm() > tol)
      throw ValidationError("edges " + edge_name(g.a) + " and " + edge_name(g.b) +
                            " are not opposite translates");
    s.partner_[s.idx(g.a)] = g.b;
    s.partner_[s.idx(g.b)] = g.a;
    // Point v_i + t*edge on a corresponds to w_{j+1} - t*edge... on b.
    const Polygon& A = s.polygon(g.a.polygon);
    const Polygon& B = s.polygon(g.b.polygon);
    const Vec2 a0 = A.vertices[static_cast<std::size_t>(g.a.edge)];
    const Vec2 b0 = B.vertices[static_cast<std::size_t>(g.b.edge)];
    const Vec2 b1 = B.vertices[(static_cast<std::size_t>(g.b.edge) + 1) % B.size()];
    const Vec2 a1 = A.vertices[(static_cast<std::size_t>(g.a.edge) + 1) % A.size()];
    s.shift_[s.idx(g.a)] = b1 - a0;
    s.shift_[s.idx(g.b)] = a1 - b0;
  }
  for (std::size_t p = 0; p < s.polygons_.size(); ++p)
    for (std::size_t e = 0; e < s.polygons_[p].size(); ++e)
      if (s.partner_[s.offsets_[p] + e].polygon < 0)
        throw ValidationError("unpaired edge " + edge_name({static_cast<int>(p), static_cast<int>(e)}));
  s.gluings_ = std::move(gluings);

  // Corner classes: corner i of edge (p,i) meets corner j+1 of its partner.
  UnionFind uf(total_edges);
  UnionFind comp(s.polygons_.size());
  for (std::size_t p = 0; p < s.polygons_.size(); ++p) {
    for (std::size_t e = 0; e < s.polygons_[p].size(); ++e) {
      const EdgeRef q = s.partner_[s.offsets_[p] + e];
      const std::size_t qn = s.polygon(q.polygon).size();
      uf.unite(static_cast<int>(s.offsets_[p] + e),
               static_cast<int>(s.offsets_[static_cast<std::size_t>(q.polygon)] + (static_cast<std::size_t>(q.edge) + 1) % qn));
      comp.unite(static_cast<int>(p), q.polygon);
    }
  }
  for (std::size_t p = 1; p < s.polygons_.size(); ++p)
    if (comp.find(static_cast<int>(p)) != comp.find(0)) throw ValidationError("surface is not connected");

  std::map<int, int> class_of_root;
  s.vclass_.resize(s.polygons_.size());
  std::vector<double> angles;
  for (std::size_t p = 0; p < s.polygons_.size(); ++p) {
    for (std::size_t i = 0; i < s.polygons_[p].size(); ++i) {
      const int root = uf.find(static_cast<int>(s.offsets_[p] + i));
      auto [it, fresh] = class_of_root.emplace(root, static_cast<int>(angles.size()));
      if (fresh) angles.push_back(0.0);
      s.vclass_[p].push_back(it->second);
      angles[static_cast<std::size_t>(it->second)] += interior_angle(s.polygons_[p], i);
    }
  }

  SurfaceReport& r = s.report_;
  r.cone_angles = angles;
  int order_sum = 0;
  for (double a : angles) {
    const double k = a / kTwoPi;
    const long kr = std::lround(k);
    if (kr < 1 || std::abs(a - kTwoPi * static_cast<double>(kr)) > 1e-9)
      throw ValidationError("cone angle " + std::to_string(a) + " is not a positive multiple of 2*pi");
    if (kr == 1) ++r.marked_points;
    else r.stratum.push_back(static_cast<int>(kr - 1));
    order_sum += static_cast<int>(kr - 1);
  }
  std::sort(r.stratum.rbegin(), r.stratum.rend());
  const long chi = static_cast<long>(angles.size()) - static_cast<long>(s.gluings_.size()) +
                   static_cast<long>(s.polygons_.size());
  if (chi % 2 != 0 || chi > 2) throw ValidationError("odd Euler characteristic");
  r.genus = static_cast<int>((2 - chi) / 2);
  if (order_sum != 2 * r.genus - 2)
    throw ValidationError("Gauss-Bonnet identity fails: sum of orders " + std::to_string(order_sum) +
                          " != 2g-2 with g=" + std::to_string(r.genus));
  r.area = 0.0;
  for (const auto& p : s.polygons_) r.area += p.signed_area();
  return s;
}

SurfaceReport validate(const TranslationSurface& s) {
  return make_surface(s.polygons(), s.gluings()).report();
}

TranslationSurface normalized(const TranslationSurface& s) {
  const double k = 1.0 / std::sqrt(s.area());
  std::vector<Polygon> polys = s.polygons();
  for (auto& p : polys)
    for (auto& v : p.vertices) v = v * k;
  TranslationSurface out = make_surface(std::move(polys), s.gluings());
  out.original_scale_ = s.original_scale_ * k;
  return out;
}

TranslationSurface rotate(const TranslationSurface& s, double theta) {
  if (theta == 0.0) return s;
  std::vector<Polygon> polys = s.polygons();
  for (auto& p : polys)
    for (auto& v : p.vertices) v = rotated(v, theta);
  return make_surface(std::move(polys), s.gluings());
}

// ---------------------------------------------------------------- catalog

namespace {

TranslationSurface torus_surface() {
  Polygon sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  return make_surface({sq}, {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}}});
}

TranslationSurface octagon_surface() {
  Polygon oct;
  for (int k = 0; k < 8; ++k) {
    const double a = (k + 0.5) * M_PI / 4.0;
    oct.vertices.push_back({std::cos(a), std::sin(a)});
  }
  std::vector<Gluing> g;
  for (int e = 0; e < 4; ++e) g.push_back({{0, e}, {0, e + 4}});
  return make_surface({oct}, g);
}

TranslationSurface l_shape_surface(double a, double b) {
  if (!(a > 1.0) || !(b > 1.0) || !std::isfinite(a) || !std::isfinite(b))
    throw ValidationError("l_shape needs arm extents a > 1 and b > 1");
  Polygon l{{{0, 0}, {1, 0}, {a, 0}, {a, 1}, {1, 1}, {1, b}, {0, b}, {0, 1}}};
  return make_surface({l}, {{{0, 0}, {0, 5}}, {{0, 1}, {0, 3}}, {{0, 2}, {0, 7}}, {{0, 4}, {0, 6}}});
}

TranslationSurface h11_surface() {
  const Permutation perm = Permutation::rotation_class(5);
  Iet iet{perm, {0.23, 0.17, 0.21, 0.19, 0.20}, 0.0};
  const std::vector<double> tau{4.0, 2.3, 0.4, -1.7, -4.2};
  return zippered_surface(iet, tau);
}

}  // namespace

TranslationSurface build_catalog(CatalogSurface which, const CatalogParams& params) {
  switch (which) {
    case CatalogSurface::Torus: return normalized(torus_surface());
    case CatalogSurface::Octagon: return normalized(octagon_surface());
    case CatalogSurface::LShape: return normalized(l_shape_surface(params.a, params.b));
    case CatalogSurface::H11Model: return normalized(h11_surface());
  }
  throw ValidationError("unknown catalog surface");
}

CatalogSurface catalog_from_name(const std::string& name) {
  if (name == "torus") return CatalogSurface::Torus;
  if (name == "octagon") return CatalogSurface::Octagon;
  if (name == "l_shape") return CatalogSurface::LShape;
  if (name == "h11_model") return CatalogSurface::H11Model;
  throw ValidationError("unknown catalog surface '" + name + "'");
}

// ------------------------------------------------------------------- flows

Trajectory flow(const TranslationSurface& s, const FlowPoint& p, double theta, double T) {
  if (!(T >= 0.0)) throw ValidationError("flow length must be nonnegative");
  if (p.polygon < 0 || static_cast<std::size_t>(p.polygon) >= s.polygons().size())
    throw ValidationError("flow point polygon out of range");
  Trajectory tr;
  tr.theta = std::fmod(theta, kTwoPi);
  if (tr.theta < 0.0) tr.theta += kTwoPi;
  const TraceResult r = trace(s, p, direction(theta), T, &tr, NoHook{});
  if (r.status == TraceResult::VertexHit)
    throw SingularityHit(r.distance, "trajectory enters the vertex tube after length " + std::to_string(r.distance));
  if (r.status == TraceResult::Stuck)
    throw SingularityHit(r.distance, "trajectory left its polygon numerically (start point near the boundary?)");
  tr.total_length = T;
  return tr;
}

// ------------------------------------------------------------- first return

std::pair<double, double> transversal_return(const TranslationSurface& surf, double theta,
                                             const Transversal& tr, double s, double max_time) {
  const Vec2 u = direction(theta);
  const Vec2 a = tr.a, ab = tr.b - tr.a;
  const double L = ab.norm();
  double landing = 0.0;
  auto hook = [&](int poly, Vec2 x, Vec2 dir, double seg, double travelled) -> std::optional<double> {
    if (poly != tr.polygon) return std::nullopt;
    const double den = dir.cross(ab);
    const double t = (a - x).cross(ab) / den;
    const double sigma = (a - x).cross(dir) / den;
    if (t < 0.0 || t > seg || sigma < 0.0 || sigma > 1.0) return std::nullopt;
    if (travelled + t <= 1e-12) return std::nullopt;
    landing = sigma * L;
    return t;
  };
  const TraceResult r = trace(surf, {tr.polygon, tr.at(s)}, u, max_time, nullptr, hook);
  switch (r.status) {
    case TraceResult::HookHit: return {landing, r.distance};
    case TraceResult::VertexHit:
      throw SingularityHit(r.distance, "return trajectory hits a vertex");
    case TraceResult::Stuck:
      throw SingularityHit(r.distance, "return trajectory lost numerically");
    case TraceResult::Completed: break;
  }
  throw NonMinimalError("no return to the transversal within time " + std::to_string(max_time));
}

FirstReturn first_return_iet(const TranslationSurface& surf, double theta, const Transversal& tr,
                             const FirstReturnConfig& cfg) {
  const double L = tr.length();
  if (!(L > 0.0)) throw ValidationError("transversal has zero length");
  if (std::abs(direction(theta).cross((tr.b - tr.a) * (1.0 / L))) < 1e-9)
    throw ValidationError("flow direction is not transverse to the segment");
  const double tmax = cfg.max_return > 0.0 ? cfg.max_return : 1e3 * surf.diameter_bound();

  struct Key {
    double offset, time;
  };
  auto eval = [&](double s) -> Key {
    const auto [landing, t] = transversal_return(surf, theta, tr, s, tmax);
    return {landing - s, t};
  };
  auto same = [&](const Key& x, const Key& y) {
    return std::abs(x.offset - y.offset) <= 1e-9 * L && std::abs(x.time - y.time) <= 1e-9 * std::max(1.0, x.time);
  };

  const int m = std::max(cfg.samples, 16);
  std::vector<double> xs(static_cast<std::size_t>(m));
  std::vector<Key> ks(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    xs[static_cast<std::size_t>(i)] = (i + 0.5) * L / m;
    ks[static_cast<std::size_t>(i)] = eval(xs[static_cast<std::size_t>(i)]);
  }

  std::vector<double> breaks;
  const double width = 1e-13 * std::max(1.0, L);
  auto refine = [&](auto&& self, double sl, Key kl, double sr, Key kr) -> void {
    if (sr - sl < width) {
      breaks.push_back(0.5 * (sl + sr));
      return;
    }
    const double mid = 0.5 * (sl + sr);
    Key km{};
    try {
      km = eval(mid);
    } catch (const SingularityHit&) {
      breaks.push_back(mid);
      return;
    }
    if (same(km, kl)) {
      self(self, mid, km, sr, kr);
    } else if (same(km, kr)) {
      self(self, sl, kl, mid, km);
    } else {
      self(self, sl, kl, mid, km);
      self(self, mid, km, sr, kr);
    }
  };
  for (int i = 0; i + 1 < m; ++i) {
    const auto j = static_cast<std::size_t>(i);
    if (!same(ks[j], ks[j + 1])) refine(refine, xs[j], ks[j], xs[j + 1], ks[j + 1]);
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts{0.0};
  for (double b : breaks)
    if (b - cuts.back() > width) cuts.push_back(b);
  if (L - cuts.back() <= width) cuts.pop_back();
  cuts.push_back(L);

  const std::size_t d = cuts.size() - 1;
  if (d < 2) throw NonMinimalError("first return map is a single translation (periodic direction?)");
  std::vector<double> lengths(d), heights(d), image_start(d);
  for (std::size_t k = 0; k < d; ++k) {
    lengths[k] = cuts[k + 1] - cuts[k];
    if (lengths[k] < 1e-10 * L) throw NonMinimalError("return-map piece shorter than resolution");
    // Piece key from the sample nearest the interval middle.
    const Key key = eval(0.5 * (cuts[k] + cuts[k + 1]));
    image_start[k] = cuts[k] + key.offset;
    heights[k] = key.time;
  }
  std::vector<Label> top(d), bottom(d);
  std::iota(top.begin(), top.end(), 0);
  std::iota(bottom.begin(), bottom.end(), 0);
  std::sort(bottom.begin(), bottom.end(), [&](Label x, Label y) {
    return image_start[static_cast<std::size_t>(x)] < image_start[static_cast<std::size_t>(y)];
  });
  double pos = 0.0;
  for (Label b : bottom) {
    if (std::abs(image_start[static_cast<std::size_t>(b)] - pos) > 1e-8 * std::max(1.0, L))
      throw NonMinimalError("return-map images do not tile the transversal");
    pos += lengths[static_cast<std::size_t>(b)];
  }

  FirstReturn fr{Iet{Permutation(top, bottom), lengths, 0.0}, heights, 0.0};
  Rng rng(cfg.verify_seed);
  int checked = 0, attempts = 0;
  while (checked < cfg.verify_points && attempts < 20 * std::max(cfg.verify_points, 1)) {
    ++attempts;
    const double s = uniform(rng, 0.0, L);
    try {
      const double direct = transversal_return(surf, theta, tr, s, tmax).first;
      fr.return_map_check = std::max(fr.return_map_check, std::abs(direct - apply(fr.iet, s)));
      ++checked;
    } catch (const SingularityHit&) {
    } catch (const BoundaryError&) {
    }
  }
  return fr;
}

// ------------------------------------------------------- saddle connections

double shortest_saddle_connection(const TranslationSurface& s, double bound) {
  if (!(bound > 0.0)) throw ValidationError("saddle-connection bound must be positive");
  const bool cones = s.has_cone_points();
  auto is_target = [&](int cls) { return !cones || s.is_cone_class(cls); };
  constexpr double delta = 1e-9;
  constexpr double slack = 1e-12;
  constexpr std::size_t cap = 100'000;
  std::size_t copies = 0;
  double best = std::numeric_limits<double>::infinity();

  // A developed copy: polygon q translated by o, entered through `entry`,
  // seen from the origin within the direction window [lo, hi].
  struct Copy {
    int q;
    Vec2 o;
    int entry;
    double lo, hi;
  };

  for (std::size_t p0 = 0; p0 < s.polygons().size(); ++p0) {
    const Polygon& P0 = s.polygons()[p0];
    for (std::size_t c0 = 0; c0 < P0.size(); ++c0) {
      if (!is_target(s.vertex_class(static_cast<int>(p0), static_cast<int>(c0)))) continue;
      const Vec2 origin = P0.vertices[c0];
      const Vec2 out = P0.vertices[(c0 + 1) % P0.size()] - origin;
      const double sector = interior_angle(P0, c0);
      auto angle_of = [&](Vec2 c) {
        double a = std::atan2(out.cross(c), out.dot(c));
        if (a < 0.0) a += kTwoPi;
        return a;
      };

      std::vector<std::pair<double, double>> candidates;  // (direction, length)
      std::vector<Copy> stack{{static_cast<int>(p0), -origin, -1, 0.0, sector}};
      while (!stack.empty()) {
        const Copy cur = stack.back();
        stack.pop_back();
        if (++copies > cap) throw ConvergenceError("saddle-connection development exceeded 1e5 polygon copies");
        const Polygon& Q = s.polygon(cur.q);
        const std::size_t n = Q.size();
        for (std::size_t v = 0; v < n; ++v) {
          const Vec2 c = Q.vertices[v] + cur.o;
          const double len = c.norm();
          if (len <= 1e-9 || len > bound) continue;
          if (!is_target(s.vertex_class(cur.q, static_cast<int>(v)))) continue;
          const double a = angle_of(c);
          if (a >= cur.lo - slack && a <= cur.hi + slack) candidates.push_back({a, len});
        }
        for (std::size_t e = 0; e < n; ++e) {
          if (static_cast<int>(e) == cur.entry) continue;
          const Vec2 A = Q.vertices[e] + cur.o, B = Q.vertices[(e + 1) % n] + cur.o;
          const Vec2 ab = B - A;
          const double t = std::clamp(-A.dot(ab) / ab.dot(ab), 0.0, 1.0);
          if ((A + ab * t).norm() > bound) continue;
          if (A.norm() < 1e-12 || B.norm() < 1e-12) continue;  // edges through the origin
          const double aa = angle_of(A), ba = angle_of(B);
          double lo = std::min(aa, ba), hi = std::max(aa, ba);
          std::vector<std::pair<double, double>> spans;
          if (hi - lo <= M_PI) spans.push_back({lo, hi});
          else {
            spans.push_back({hi, kTwoPi});
            spans.push_back({0.0, lo});
          }
          const EdgeRef er{cur.q, static_cast<int>(e)};
          const EdgeRef nb = s.partner(er);
          for (auto [l, h] : spans) {
            const double wl = std::max(l, cur.lo), wh = std::min(h, cur.hi);
            // Rays through a vertex end there, so windows stay open.
            if (wh - wl <= slack) continue;
            stack.push_back({nb.polygon, cur.o - s.shift(er), nb.edge, wl, wh});
          }
        }
      }

      std::sort(candidates.begin(), candidates.end());
      double last_angle = -1.0;
      for (const auto& [ang, len] : candidates) {
        if (std::abs(ang - last_angle) < 1e-12) continue;
        last_angle = ang;
        if (len >= best) continue;
        if (ang < 1e-12 || sector - ang < 1e-12) {
          // Along a side of the corner: the side itself, when it ends at a target.
          const std::size_t v = ang < 1e-12 ? (c0 + 1) % P0.size() : (c0 + P0.size() - 1) % P0.size();
          if (is_target(s.vertex_class(static_cast<int>(p0), static_cast<int>(v))) &&
              std::abs((P0.vertices[v] - origin).norm() - len) < 1e-9)
            best = std::min(best, len);
          continue;
        }
        const Vec2 dir = rotated(out * (1.0 / out.norm()), ang);
        const TraceResult r =
            trace(s, {static_cast<int>(p0), origin + dir * delta}, dir, len + 1e-6, nullptr, NoHook{});
        if (r.status == TraceResult::VertexHit && is_target(r.vertex_class) &&
            std::abs(r.distance + delta - len) < 1e-7)
          best = std::min(best, len);
      }
    }
  }
  return best;
}

// --------------------------------------------------------- zippered surfaces

std::vector<double> suspension_heights(const Permutation& perm, const std::vector<double>& tau) {
  const OmegaForm om = omega(perm);
  const std::size_t d = perm.size();
  if (tau.size() != d) throw ValidationError("suspension data size mismatch");
  std::vector<double> h(d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) h[a] -= om.matrix[a * d + b] * tau[b];
  return h;
}

bool is_suspension_data(const Permutation& perm, const std::vector<double>& tau) {
  const std::size_t d = perm.size();
  if (tau.size() != d) return false;
  double top = 0.0, bottom = 0.0;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    top += tau[static_cast<std::size_t>(perm.top()[k])];
    bottom += tau[static_cast<std::size_t>(perm.bottom()[k])];
    if (!(top > 0.0) || !(bottom < 0.0)) return false;
  }
  return true;
}

std::vector<double> sample_suspension_data(const Permutation& perm, Rng& rng) {
  const std::size_t d = perm.size();
  if (!perm.is_irreducible()) throw ReducibleError("suspension data needs an irreducible permutation");
  for (int attempt = 0; attempt < 10'000; ++attempt) {
    std::vector<double> tau(d);
    for (std::size_t a = 0; a < d; ++a) {
      const double base = perm.bottom_position(static_cast<Label>(a)) - perm.top_position(static_cast<Label>(a));
      tau[a] = base * uniform(rng, 0.5, 1.5);
    }
    if (is_suspension_data(perm, tau)) return tau;
  }
  throw ConvergenceError("could not sample suspension data");
}

TranslationSurface zippered_surface(const Iet& iet, const std::vector<double>& tau) {
  iet.check();
  const Permutation& perm = iet.perm;
  if (!is_suspension_data(perm, tau)) throw ValidationError("tau is not suspension data for this permutation");
  const std::size_t d = perm.size();
  auto zeta = [&](Label a) {
    return Vec2{iet.lengths[static_cast<std::size_t>(a)], tau[static_cast<std::size_t>(a)]};
  };
  std::vector<Vec2> top_pts{{0, 0}}, bottom_pts{{0, 0}};
  for (std::size_t k = 0; k < d; ++k) {
    top_pts.push_back(top_pts.back() + zeta(perm.top()[k]));
    bottom_pts.push_back(bottom_pts.back() + zeta(perm.bottom()[k]));
  }
  // Counterclockwise: bottom line left to right, then top line right to left.
  Polygon poly;
  for (std::size_t k = 0; k < d; ++k) poly.vertices.push_back(bottom_pts[k]);
  for (std::size_t k = d; k >= 1; --k) poly.vertices.push_back(top_pts[k]);
  std::vector<Gluing> g;
  for (std::size_t a = 0; a < d; ++a) {
    const int be = perm.bottom_position(static_cast<Label>(a));
    const int te = static_cast<int>(2 * d - 1) - perm.top_position(static_cast<Label>(a));
    g.push_back({{0, be}, {0, te}});
  }
  return make_surface({poly}, g);
}

}  // namespace teichlab
