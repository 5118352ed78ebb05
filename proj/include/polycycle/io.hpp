#ifndef POLYCYCLE_IO_HPP
#define POLYCYCLE_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "polycycle/bifurcate.hpp"
#include "polycycle/builder.hpp"
#include "polycycle/flow.hpp"
#include "polycycle/poly.hpp"

namespace polycycle::io {

using json = nlohmann::ordered_json;

json poly_to_json(const Poly2& p);          // [[i, j, c], ...]
Poly2 poly_from_json(const json& j);

json field_to_json(const VectorField2& f);  // {"p": [...], "q": [...]}
VectorField2 field_from_json(const json& j);

json built_to_json(const BuiltPolycycle& b);
BuiltPolycycle built_from_json(const json& j);

/// Writes through a temp file in the same directory, then renames.
void write_json_atomic(const std::string& path, const json& j);
json read_json(const std::string& path);

void write_trajectory_csv(const std::string& path,
                          const std::vector<double>& times,
                          const std::vector<Point2>& states);

/// Deterministic phase-portrait SVG: closed polygon, labeled vertices,
/// trajectories as polylines, cycles as highlighted closed curves.
struct SvgScene {
    std::vector<Point2> polygon;
    std::vector<std::vector<Point2>> trajectories;
    std::vector<std::vector<Point2>> cycles;
};

std::string render_svg(const SvgScene& scene, int width = 640,
                       int height = 640);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace polycycle::io

#endif
