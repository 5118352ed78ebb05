#include "polycycle/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polycycle::io {

namespace {

json point_to_json(const Point2& p) { return json::array({p[0], p[1]}); }

Point2 point_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw std::runtime_error("expected a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json poly_to_json(const Poly2& p)
{
    json out = json::array();
    for (const auto& t : p.terms()) out.push_back(json::array({t.i, t.j, t.c}));
    return out;
}

Poly2 poly_from_json(const json& j)
{
    if (!j.is_array()) throw std::runtime_error("polynomial: expected an array");
    std::vector<Poly2::Term> terms;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3)
            throw std::runtime_error("polynomial: expected [i, j, coeff] triples");
        terms.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    return Poly2(std::move(terms));
}

json field_to_json(const VectorField2& f)
{
    return json{{"p", poly_to_json(f.p)}, {"q", poly_to_json(f.q)}};
}

VectorField2 field_from_json(const json& j)
{
    if (!j.contains("p") || !j.contains("q"))
        throw std::runtime_error("vector field: expected keys \"p\" and \"q\"");
    return {poly_from_json(j.at("p")), poly_from_json(j.at("q"))};
}

json built_to_json(const BuiltPolycycle& b)
{
    json j;
    j["spec"] = {
        {"n", b.spec.n},
        {"ratios", b.spec.ratios},
        {"orientation",
         b.spec.orientation == Orientation::clockwise ? "cw" : "ccw"}};
    j["field"] = field_to_json(b.field);
    j["vertices"] = json::array();
    for (const auto& v : b.vertices) j["vertices"].push_back(point_to_json(v));
    j["lines"] = json::array();
    for (const auto& l : b.lines)
        j["lines"].push_back({{"alpha", l.alpha}, {"beta", l.beta},
                              {"offset", l.offset}});
    j["affine_factors"] = json::array();
    for (const auto& a : b.affine_factors)
        j["affine_factors"].push_back({{"a", a.a}, {"b", a.b}, {"c", a.c}});
    j["section_bases"] = json::array();
    for (const auto& p : b.section_bases)
        j["section_bases"].push_back(point_to_json(p));
    j["section_dirs"] = json::array();
    for (const auto& v : b.section_dirs)
        j["section_dirs"].push_back(point_to_json(v));
    j["sin_theta"] = b.sin_theta;
    j["m_const"] = b.m_const;
    return j;
}

BuiltPolycycle built_from_json(const json& j)
{
    BuiltPolycycle b;
    const json& s = j.at("spec");
    b.spec.n = s.at("n").get<int>();
    b.spec.ratios = s.at("ratios").get<std::vector<double>>();
    b.spec.orientation = s.at("orientation").get<std::string>() == "cw"
                             ? Orientation::clockwise
                             : Orientation::counterclockwise;
    b.field = field_from_json(j.at("field"));
    for (const auto& e : j.at("vertices")) b.vertices.push_back(point_from_json(e));
    for (const auto& e : j.at("lines"))
        b.lines.push_back({e.at("alpha").get<double>(),
                           e.at("beta").get<double>(),
                           e.at("offset").get<double>()});
    for (const auto& e : j.at("affine_factors"))
        b.affine_factors.push_back({e.at("a").get<double>(),
                                    e.at("b").get<double>(),
                                    e.at("c").get<double>()});
    for (const auto& e : j.at("section_bases"))
        b.section_bases.push_back(point_from_json(e));
    for (const auto& e : j.at("section_dirs"))
        b.section_dirs.push_back(point_from_json(e));
    b.sin_theta = j.at("sin_theta").get<double>();
    b.m_const = j.at("m_const").get<double>();
    return b;
}

void write_text_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path().empty()
                             ? fs::path(target.string() + ".tmp")
                             : target.parent_path() /
                                   (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_json_atomic(const std::string& path, const json& j)
{
    write_text_atomic(path, j.dump(2) + "\n");
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<double>& times,
                          const std::vector<Point2>& states)
{
    if (times.size() != states.size())
        throw std::invalid_argument("trajectory csv: size mismatch");
    std::ostringstream out;
    out << "t,x1,x2\n";
    out.precision(17);
    for (std::size_t k = 0; k < times.size(); ++k)
        out << times[k] << ',' << states[k][0] << ',' << states[k][1] << '\n';
    write_text_atomic(path, out.str());
}

namespace {

struct Mapper {
    double min_x, min_y, scale, height;
    Point2 operator()(const Point2& p) const
    {
        return {(p[0] - min_x) * scale + 20.0,
                height - 20.0 - (p[1] - min_y) * scale};
    }
};

void append_polyline(std::ostringstream& svg, const std::vector<Point2>& pts,
                     const Mapper& map, const char* style, bool closed)
{
    if (pts.empty()) return;
    svg << (closed ? "  <polygon points=\"" : "  <polyline points=\"");
    char buf[64];
    for (const auto& p : pts) {
        const Point2 m = map(p);
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", m[0], m[1]);
        svg << buf;
    }
    svg << "\" " << style << "/>\n";
}

}  // namespace

std::string render_svg(const SvgScene& scene, int width, int height)
{
    double min_x = -1.2, max_x = 1.2, min_y = -1.2, max_y = 1.2;
    auto widen = [&](const std::vector<Point2>& pts) {
        for (const auto& p : pts) {
            min_x = std::min(min_x, p[0]);
            max_x = std::max(max_x, p[0]);
            min_y = std::min(min_y, p[1]);
            max_y = std::max(max_y, p[1]);
        }
    };
    widen(scene.polygon);
    for (const auto& t : scene.trajectories) widen(t);
    for (const auto& c : scene.cycles) widen(c);

    const double sx = (width - 40.0) / (max_x - min_x);
    const double sy = (height - 40.0) / (max_y - min_y);
    const Mapper map{min_x, min_y, std::min(sx, sy),
                     static_cast<double>(height)};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    append_polyline(svg, scene.polygon, map,
                    "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"",
                    true);
    for (std::size_t i = 0; i < scene.polygon.size(); ++i) {
        const Point2 m = map(scene.polygon[i]);
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" "
                      "fill=\"black\"/>\n",
                      m[0], m[1]);
        svg << buf;
        std::snprintf(buf, sizeof buf,
                      "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">p%zu"
                      "</text>\n",
                      m[0] + 5.0, m[1] - 5.0, i + 1);
        svg << buf;
    }
    for (const auto& t : scene.trajectories)
        append_polyline(svg, t, map,
                        "fill=\"none\" stroke=\"steelblue\" "
                        "stroke-width=\"0.8\"",
                        false);
    for (const auto& c : scene.cycles)
        append_polyline(svg, c, map,
                        "fill=\"none\" stroke=\"crimson\" stroke-width=\"1.2\"",
                        true);
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace polycycle::io
