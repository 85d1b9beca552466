#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "teichlab/iet.hpp"
#include "teichlab/spectral_torus.hpp"
#include "teichlab/surface.hpp"

namespace teichlab::io {

using Json = nlohmann::json;

// {"top": [...], "bottom": [...], "lengths": [...]}, symbols as strings.
Iet iet_from_json(const Json& j);
Json to_json(const Iet& iet);

// {"polygons": [[[x,y],...],...], "gluings": [[[p,e],[p',e']],...]}
TranslationSurface surface_from_json(const Json& j);
Json to_json(const TranslationSurface& s);
Json to_json(const SurfaceReport& r);

// {"coeffs": [[n1, n2, re, im], ...]}
torus::FourierFunction fourier_from_json(const Json& j);
Json to_json(const torus::FourierFunction& f);

Json read_json_file(const std::filesystem::path& path);

// Rectangular numeric table with a header row.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// RFC 4180 text; numbers with 17 significant digits.
std::string csv_text(const Series& s);
void emit_csv(const Series& s, const std::filesystem::path& path);

// Shortest round-trip formatting used for CSV cells.
std::string format_number(double v);

}  // namespace teichlab::io
