#include "teichlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "teichlab/errors.hpp"

namespace teichlab::io {

namespace {

std::vector<std::string> symbol_row(const Json& row, const char* key) {
  if (!row.is_array()) throw ValidationError(std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : row) {
    if (v.is_string()) out.push_back(v.get<std::string>());
    else if (v.is_number_integer()) out.push_back(std::to_string(v.get<long long>()));
    else throw ValidationError(std::string("'") + key + "' entries must be strings or integers");
  }
  return out;
}

double number(const Json& v, const char* what) {
  if (!v.is_number()) throw ValidationError(std::string(what) + " must be numeric");
  return v.get<double>();
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Iet iet_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("top") || !j.contains("bottom") || !j.contains("lengths"))
    throw ValidationError("IET JSON needs 'top', 'bottom' and 'lengths'");
  Permutation perm = Permutation::from_names(symbol_row(j["top"], "top"), symbol_row(j["bottom"], "bottom"));
  const Json& lj = j["lengths"];
  if (!lj.is_array() || lj.size() != perm.size())
    throw ValidationError("'lengths' must list one value per top symbol");
  Iet iet{std::move(perm), {}, 0.0};
  for (const auto& v : lj) iet.lengths.push_back(number(v, "length"));
  iet.check();
  return iet;
}

Json to_json(const Iet& iet) {
  Json top = Json::array(), bottom = Json::array(), lengths = Json::array();
  const auto& names = iet.perm.names();
  for (Label a : iet.perm.top()) top.push_back(names[static_cast<std::size_t>(a)]);
  for (Label a : iet.perm.bottom()) bottom.push_back(names[static_cast<std::size_t>(a)]);
  // Lengths in top order so that they line up with the input convention.
  for (Label a : iet.perm.top()) lengths.push_back(iet.lengths[static_cast<std::size_t>(a)]);
  return {{"top", top}, {"bottom", bottom}, {"lengths", lengths}};
}

TranslationSurface surface_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("polygons") || !j.contains("gluings"))
    throw ValidationError("surface JSON needs 'polygons' and 'gluings'");
  std::vector<Polygon> polys;
  for (const auto& pj : j["polygons"]) {
    Polygon p;
    for (const auto& vj : pj) {
      if (!vj.is_array() || vj.size() != 2) throw ValidationError("vertices must be [x, y] pairs");
      p.vertices.push_back({number(vj[0], "vertex coordinate"), number(vj[1], "vertex coordinate")});
    }
    polys.push_back(std::move(p));
  }
  std::vector<Gluing> gl;
  auto ref = [](const Json& r) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
      throw ValidationError("edge references must be [polygon, edge] integer pairs");
    return EdgeRef{r[0].get<int>(), r[1].get<int>()};
  };
  for (const auto& gj : j["gluings"]) {
    if (!gj.is_array() || gj.size() != 2) throw ValidationError("gluings must be pairs of edge references");
    gl.push_back({ref(gj[0]), ref(gj[1])});
  }
  return make_surface(std::move(polys), std::move(gl));
}

Json to_json(const TranslationSurface& s) {
  Json polys = Json::array(), gl = Json::array();
  for (const auto& p : s.polygons()) {
    Json pj = Json::array();
    for (const auto& v : p.vertices) pj.push_back({v.x, v.y});
    polys.push_back(pj);
  }
  for (const auto& g : s.gluings()) gl.push_back({{g.a.polygon, g.a.edge}, {g.b.polygon, g.b.edge}});
  return {{"polygons", polys}, {"gluings", gl}};
}

Json to_json(const SurfaceReport& r) {
  return {{"genus", r.genus},
          {"stratum", r.stratum},
          {"marked_points", r.marked_points},
          {"area", r.area},
          {"cone_angles", r.cone_angles}};
}

torus::FourierFunction fourier_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
    throw ValidationError("Fourier JSON needs a 'coeffs' array");
  torus::FourierFunction f;
  for (const auto& c : j["coeffs"]) {
    if (!c.is_array() || c.size() != 4 || !c[0].is_number_integer() || !c[1].is_number_integer())
      throw ValidationError("coefficients must be [n1, n2, re, im]");
    const torus::Frequency n{c[0].get<int>(), c[1].get<int>()};
    f.set(n, f.coeff(n) + torus::Complex(number(c[2], "re"), number(c[3], "im")));
  }
  f.set_reality_flag(f.is_conjugate_symmetric());
  return f;
}

Json to_json(const torus::FourierFunction& f) {
  Json arr = Json::array();
  for (const auto& [n, c] : f.coeffs()) arr.push_back({n.first, n.second, c.real(), c.imag()});
  return {{"coeffs", arr}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const Series& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.columns.size(); ++i) os << (i ? "," : "") << csv_cell(s.columns[i]);
  os << "\r\n";
  for (const auto& row : s.rows) {
    if (row.size() != s.columns.size()) throw ValidationError("CSV series is not rectangular");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << "\r\n";
  }
  return os.str();
}

void emit_csv(const Series& s, const std::filesystem::path& path) {
  const std::string text = csv_text(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace teichlab::io
