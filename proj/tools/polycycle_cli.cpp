// Command-line front end: builds polycycle fields, analyzes ratio
// combinatorics, runs simulations and the bifurcation engine, and emits
// JSON/CSV/SVG reports.

#include <cstdlib>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "polycycle/approx.hpp"
#include "polycycle/bifurcate.hpp"
#include "polycycle/builder.hpp"
#include "polycycle/curves.hpp"
#include "polycycle/flow.hpp"
#include "polycycle/graphic.hpp"
#include "polycycle/io.hpp"
#include "polycycle/melnikov.hpp"
#include "polycycle/modelmap.hpp"
#include "polycycle/poly.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using polycycle::io::json;

int worker_cap()
{
    if (const char* env = std::getenv("POLYCYCLE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

std::vector<double> parse_csv_doubles(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("expected comma-separated numbers");
    return out;
}

json base_report(const std::string& command, const json& config)
{
    json j;
    j["tool"] = "polycycle";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config;
    return j;
}

void emit(const json& report, const std::string& out_path)
{
    if (out_path.empty())
        std::cout << report.dump(2) << "\n";
    else
        polycycle::io::write_json_atomic(out_path, report);
}

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical workbench for hyperbolic polycycles of planar "
                 "polynomial vector fields"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // ---- build ----
    auto* cmd_build = app.add_subcommand("build",
                                         "Construct a regular n-gon polycycle "
                                         "field with prescribed ratios");
    int build_n = 3;
    std::string build_ratios, build_orient = "cw", build_out;
    cmd_build->add_option("--n", build_n, "number of saddles (>= 3)");
    cmd_build->add_option("--ratios", build_ratios,
                          "comma-separated hyperbolicity ratios r_1..r_n")
        ->required();
    cmd_build->add_option("--orientation", build_orient, "cw or ccw")
        ->check(CLI::IsMember({"cw", "ccw"}));
    cmd_build->add_option("--out", build_out, "output JSON path");

    // ---- analyze ----
    auto* cmd_analyze = app.add_subcommand(
        "analyze", "Ratio combinatorics: graphic number, stability, "
                   "Delta, CH-conditions");
    std::string an_ratios, an_out;
    cmd_analyze->add_option("--ratios", an_ratios, "comma-separated ratios")
        ->required();
    cmd_analyze->add_option("--out", an_out, "output JSON path");

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand("simulate",
                                       "Integrate one orbit of a saved field");
    std::string sim_field, sim_start, sim_out;
    double sim_time = 10.0, sim_rtol = 1e-10, sim_atol = 1e-12;
    cmd_sim->add_option("--field", sim_field, "field JSON from `build`")
        ->required();
    cmd_sim->add_option("--start", sim_start, "initial point x1,x2")->required();
    cmd_sim->add_option("--time", sim_time, "integration time (signed)");
    cmd_sim->add_option("--rtol", sim_rtol, "relative tolerance");
    cmd_sim->add_option("--atol", sim_atol, "absolute tolerance");
    cmd_sim->add_option("--out", sim_out, "trajectory CSV path");

    // ---- dulac ----
    auto* cmd_dulac = app.add_subcommand(
        "dulac", "Fit the saddle-passage exponent from transition maps");
    std::string du_field, du_window = "1e-5,1e-3", du_out;
    int du_saddle = 1, du_points = 7;
    bool du_reverse = false;
    cmd_dulac->add_option("--field", du_field, "field JSON from `build`")
        ->required();
    cmd_dulac->add_option("--saddle", du_saddle, "saddle index 1..n");
    cmd_dulac->add_option("--window", du_window, "entry coordinates lo,hi");
    cmd_dulac->add_option("--points", du_points, "fit ladder size");
    cmd_dulac->add_flag("--reverse", du_reverse,
                        "time-reversed passage (fits 1/r)");
    cmd_dulac->add_option("--out", du_out, "output JSON path");

    // ---- melnikov ----
    auto* cmd_meln = app.add_subcommand(
        "melnikov", "Displacement-derivative matrix of a perturbation family");
    std::string me_field, me_family = "main3", me_out;
    cmd_meln->add_option("--field", me_field, "field JSON from `build`")
        ->required();
    cmd_meln->add_option("--family", me_family, "perturbation family")
        ->check(CLI::IsMember({"main3"}));
    cmd_meln->add_option("--out", me_out, "output JSON path");

    // ---- break ----
    auto* cmd_break = app.add_subcommand(
        "break", "Connection-breaking Newton solve at a fixed free parameter");
    std::string br_field, br_family = "main3", br_plan = "auto", br_out;
    double br_free = 1e-4;
    cmd_break->add_option("--field", br_field, "field JSON from `build`")
        ->required();
    cmd_break->add_option("--family", br_family, "perturbation family")
        ->check(CLI::IsMember({"main3"}));
    cmd_break->add_option("--plan", br_plan,
                          "expulsion plan (auto = exhaustive Delta maximizer)");
    cmd_break->add_option("--free", br_free, "fixed value of mu_n");
    cmd_break->add_option("--out", br_out, "output JSON path");

    // ---- cycles ----
    auto* cmd_cycles = app.add_subcommand(
        "cycles", "Limit-cycle scan of the first return map");
    std::string cy_field, cy_window = "0,0.1", cy_out;
    int cy_grid = 64;
    cmd_cycles->add_option("--field", cy_field,
                           "broken-field JSON from `break` (or build JSON)")
        ->required();
    cmd_cycles->add_option("--window", cy_window,
                           "coordinate magnitudes lo,hi on the return side");
    cmd_cycles->add_option("--grid", cy_grid, "geometric grid size");
    cmd_cycles->add_option("--out", cy_out, "output JSON path");

    // ---- modelmap ----
    auto* cmd_model = app.add_subcommand(
        "modelmap", "Fixed points of the nested power-plus-offset model map");
    std::string mm_ratios, mm_offsets, mm_window = "0,0.1";
    std::string mm_out;
    double mm_alpha = 1.0;
    int mm_grid = 2000;
    cmd_model->add_option("--ratios", mm_ratios, "comma-separated ratios")
        ->required();
    cmd_model->add_option("--offsets", mm_offsets, "comma-separated offsets")
        ->required();
    cmd_model->add_option("--alpha", mm_alpha, "slope of the fixed-point line");
    cmd_model->add_option("--window", mm_window, "domain lo,hi");
    cmd_model->add_option("--grid", mm_grid, "scan grid size");
    cmd_model->add_option("--out", mm_out, "output JSON path");

    // ---- bump-approx ----
    auto* cmd_bump = app.add_subcommand(
        "bump-approx", "Shifted Bernstein approximant of a radial bump");
    double bu_d1 = 0.1, bu_d2 = 0.3, bu_eps = 0.1;
    std::string bu_center = "0,0", bu_box = "-1,-1,1,1", bu_out;
    int bu_order = 0;
    cmd_bump->add_option("--delta1", bu_d1, "inner plateau radius");
    cmd_bump->add_option("--delta2", bu_d2, "outer support radius");
    cmd_bump->add_option("--eps", bu_eps, "shift/sandwich width");
    cmd_bump->add_option("--center", bu_center, "bump center x1,x2");
    cmd_bump->add_option("--box", bu_box, "certificate box lo1,lo2,hi1,hi2");
    cmd_bump->add_option("--order", bu_order, "derivative orders certified");
    cmd_bump->add_option("--out", bu_out, "output JSON path");

    // ---- plot ----
    auto* cmd_plot = app.add_subcommand("plot", "Render a phase-portrait SVG");
    std::string pl_field, pl_cycles, pl_out = "portrait.svg";
    std::vector<std::string> pl_trajs;
    cmd_plot->add_option("--field", pl_field, "field JSON from `build`/`break`")
        ->required();
    cmd_plot->add_option("--traj", pl_trajs, "trajectory CSV path(s)");
    cmd_plot->add_option("--cycles", pl_cycles, "cycles JSON from `cycles`");
    cmd_plot->add_option("--out", pl_out, "output SVG path");

    CLI11_PARSE(app, argc, argv);

    using namespace polycycle;

    try {
        if (*cmd_build) {
            const auto ratios = parse_csv_doubles(build_ratios);
            PolycycleSpec spec{build_n, ratios,
                               build_orient == "cw"
                                   ? Orientation::clockwise
                                   : Orientation::counterclockwise};
            const BuiltPolycycle b = build_polycycle(spec);
            json config{{"n", build_n},
                        {"ratios", ratios},
                        {"orientation", build_orient}};
            json rep = base_report("build", config);
            rep["built"] = io::built_to_json(b);
            json sd = json::array();
            for (int s = 1; s <= b.n(); ++s) {
                const SaddleData d = saddle_data(b, s);
                sd.push_back({{"eigen_neg", d.eigen_neg},
                              {"eigen_pos", d.eigen_pos},
                              {"ratio", d.ratio}});
            }
            rep["saddles"] = sd;
            emit(rep, build_out);
        } else if (*cmd_analyze) {
            const auto ratios = parse_csv_doubles(an_ratios);
            json config{{"ratios", ratios}};
            json rep = base_report("analyze", config);
            rep["graphic_number"] = graphic::graphic_number(ratios);
            switch (graphic::stability(ratios)) {
                case graphic::Stability::stable: rep["stability"] = "stable"; break;
                case graphic::Stability::unstable:
                    rep["stability"] = "unstable";
                    break;
                default: rep["stability"] = "undetermined";
            }
            const auto plan = graphic::delta_max(ratios);
            rep["delta"] = plan.delta;
            rep["permutation"] = plan.permutation;
            rep["partial_products"] = plan.partial_products;
            const auto ch = graphic::check_ch_conditions(ratios);
            rep["ch_satisfied"] = ch.pass;
            rep["ch_witness"] = ch.witness;
            emit(rep, an_out);
        } else if (*cmd_sim) {
            const json fj = io::read_json(sim_field);
            const VectorField2 f =
                fj.contains("built")
                    ? io::built_from_json(fj.at("built")).field
                    : io::field_from_json(fj.contains("field_broken")
                                              ? fj.at("field_broken")
                                              : fj);
            const auto start = parse_csv_doubles(sim_start);
            if (start.size() != 2)
                throw CLI::ValidationError("--start needs x1,x2");
            flow::IntegrateOptions opts;
            opts.rtol = sim_rtol;
            opts.atol = sim_atol;
            opts.record = true;
            const flow::Trajectory tr = flow::integrate(
                [&f](const Point2& x) { return f.eval(x); },
                {start[0], start[1]}, 0.0, sim_time, {}, opts);
            if (sim_out.empty()) {
                json config{{"field", sim_field}, {"start", start},
                            {"time", sim_time}, {"rtol", sim_rtol},
                            {"atol", sim_atol}};
                json rep = base_report("simulate", config);
                rep["accepted"] = tr.accepted;
                rep["rejected"] = tr.rejected;
                rep["final_time"] = tr.final_time;
                rep["final_state"] = {tr.final_state[0], tr.final_state[1]};
                emit(rep, "");
            } else {
                io::write_trajectory_csv(sim_out, tr.times, tr.states);
            }
        } else if (*cmd_dulac) {
            const json fj = io::read_json(du_field);
            const BuiltPolycycle b = io::built_from_json(fj.at("built"));
            const auto window = parse_csv_doubles(du_window);
            if (window.size() != 2 || !(0 < window[0]) ||
                !(window[0] < window[1]))
                throw CLI::ValidationError("--window needs 0 < lo < hi");
            const int n = b.n();
            const int s = du_saddle;
            if (s < 1 || s > n) throw CLI::ValidationError("--saddle out of range");
            // passage at p_s: incoming section s, outgoing section s-1
            // (clockwise edge orbits), swapped under time reversal
            const auto secs = bifurcate::sections_of(b);
            const bifurcate::Sigma0 s0 = bifurcate::detect_sigma0(b);
            const double side = bifurcate::sign_of(s0);
            const int inc = s - 1, outg = (s - 2 + n) % n;
            VectorField2 fwd = b.field;
            const flow::FieldFn ff = [&](const Point2& x) {
                const Vec2 v = fwd.eval(x);
                return du_reverse ? Vec2{-v[0], -v[1]} : v;
            };
            const flow::Section& from = du_reverse ? secs[outg] : secs[inc];
            const flow::Section& to = du_reverse ? secs[inc] : secs[outg];
            std::vector<double> ladder;
            for (int k = 0; k < du_points; ++k)
                ladder.push_back(side * window[0] *
                                 std::pow(window[1] / window[0],
                                          double(k) / (du_points - 1)));
            flow::IntegrateOptions opts;
            opts.rtol = 1e-12;
            opts.atol = 1e-14;
            opts.max_step = 0.5;
            const flow::DulacEstimate est =
                flow::estimate_dulac_exponent(ff, from, to, ladder, opts);
            json config{{"field", du_field}, {"saddle", s},
                        {"window", window}, {"points", du_points},
                        {"reverse", du_reverse}};
            json rep = base_report("dulac", config);
            rep["exponent"] = est.exponent;
            rep["coefficient"] = est.coefficient;
            rep["fit_residual"] = est.fit_residual;
            rep["requested_ratio"] = b.spec.ratios[s - 1];
            emit(rep, du_out);
        } else if (*cmd_meln) {
            const json fj = io::read_json(me_field);
            const BuiltPolycycle b = io::built_from_json(fj.at("built"));
            const melnikov::PerturbationFamily fam = melnikov::main3_family(b);
            const int n = b.n();
            // entries are independent; cap workers by POLYCYCLE_THREADS
            const int workers = std::min(worker_cap(), n);
            std::vector<std::future<std::vector<melnikov::MelnikovEntry>>> futs;
            for (int i = 1; i <= n; ++i)
                futs.push_back(std::async(
                    workers > 1 ? std::launch::async : std::launch::deferred,
                    [&fam, &b, i, n] {
                        std::vector<melnikov::MelnikovEntry> row;
                        for (int j = 1; j <= n; ++j)
                            row.push_back(
                                melnikov::melnikov_derivative(fam, b, i, j));
                        return row;
                    }));
            json matrix = json::array(), tails = json::array();
            for (auto& fu : futs) {
                const auto row = fu.get();
                json mr = json::array(), tr = json::array();
                for (const auto& e : row) {
                    mr.push_back(e.value);
                    tr.push_back(e.tail_bound);
                }
                matrix.push_back(mr);
                tails.push_back(tr);
            }
            json config{{"field", me_field}, {"family", me_family},
                        {"threads", workers}};
            json rep = base_report("melnikov", config);
            rep["matrix"] = matrix;
            rep["tail_bounds"] = tails;
            emit(rep, me_out);
        } else if (*cmd_break) {
            const json fj = io::read_json(br_field);
            const BuiltPolycycle b = io::built_from_json(fj.at("built"));
            const melnikov::PerturbationFamily fam = melnikov::main3_family(b);
            const auto plan = graphic::delta_max(b.spec.ratios);
            const bifurcate::BreakResult res =
                bifurcate::solve_connection_break(fam, b, br_free);
            json config{{"field", br_field}, {"family", br_family},
                        {"plan", br_plan},  {"free", br_free}};
            json rep = base_report("break", config);
            rep["delta_plan"] = {{"delta", plan.delta},
                                 {"permutation", plan.permutation}};
            rep["mu"] = res.mu;
            rep["iterations"] = res.iterations;
            rep["residual"] = res.residual;
            rep["sigma0"] = static_cast<int>(res.displacements.sigma0);
            json ds = json::array();
            for (const auto& c : res.displacements.connections)
                ds.push_back({{"b_u", c.b_u}, {"b_s", c.b_s}, {"d", c.d}});
            rep["displacements"] = ds;
            rep["bypass"] = {
                {"value", res.bypass.value},
                {"regime", res.bypass.regime == bifurcate::BypassRegime::bypass
                               ? "bypass"
                               : "unbroken"}};
            rep["built"] = fj.at("built");
            rep["field_broken"] =
                io::field_to_json(fam.materialize(res.mu));
            emit(rep, br_out);
        } else if (*cmd_cycles) {
            const json fj = io::read_json(cy_field);
            const BuiltPolycycle b = io::built_from_json(fj.at("built"));
            const VectorField2 f = fj.contains("field_broken")
                                       ? io::field_from_json(fj.at("field_broken"))
                                       : b.field;
            const auto window = parse_csv_doubles(cy_window);
            if (window.size() != 2 || !(window[0] < window[1]))
                throw CLI::ValidationError("--window needs lo < hi");
            const double side =
                fj.contains("sigma0")
                    ? double(fj.at("sigma0").get<int>())
                    : bifurcate::sign_of(bifurcate::detect_sigma0(b));
            double t_lo = side * window[1], t_hi = side * window[0];
            if (t_lo > t_hi) std::swap(t_lo, t_hi);
            const auto secs = bifurcate::sections_of(b);
            std::vector<Point2> polygon = b.vertices;
            const auto cycles = bifurcate::detect_cycles(
                f, secs, 0, t_lo, t_hi, cy_grid, polygon);
            json config{{"field", cy_field}, {"window", window},
                        {"grid", cy_grid},  {"sigma0", side}};
            json rep = base_report("cycles", config);
            json arr = json::array();
            for (const auto& c : cycles) {
                json orbit = json::array();
                for (const auto& p : c.orbit)
                    orbit.push_back({p[0], p[1]});
                arr.push_back({{"fixed_point", c.fixed_point},
                               {"period", c.period},
                               {"multiplier", c.multiplier},
                               {"hausdorff_to_polycycle",
                                c.hausdorff_to_polycycle},
                               {"orbit", orbit}});
            }
            rep["cycles"] = arr;
            emit(rep, cy_out);
        } else if (*cmd_model) {
            ModelMapSpec spec;
            spec.ratios = parse_csv_doubles(mm_ratios);
            spec.offsets = parse_csv_doubles(mm_offsets);
            spec.alpha = mm_alpha;
            const auto window = parse_csv_doubles(mm_window);
            if (window.size() != 2 || !(window[0] < window[1]))
                throw CLI::ValidationError("--window needs lo < hi");
            spec.rho = window[0];
            spec.eps_upper = window[1];
            const ModelRoots roots = model_map_roots(spec, mm_grid);
            json config{{"ratios", spec.ratios}, {"offsets", spec.offsets},
                        {"alpha", spec.alpha},   {"window", window},
                        {"grid", mm_grid}};
            json rep = base_report("modelmap", config);
            rep["roots"] = roots.roots;
            rep["tangencies"] = roots.tangencies;
            rep["skipped_grid_points"] = roots.skipped;
            emit(rep, mm_out);
        } else if (*cmd_bump) {
            const auto center = parse_csv_doubles(bu_center);
            const auto boxv = parse_csv_doubles(bu_box);
            if (center.size() != 2 || boxv.size() != 4)
                throw CLI::ValidationError("--center needs 2 and --box 4 numbers");
            approx::BumpSpec spec{bu_d1, bu_d2, {center[0], center[1]}};
            approx::Box box{boxv[0], boxv[1], boxv[2], boxv[3]};
            const approx::ShiftedBumpPoly q =
                approx::shifted_bump_polynomial(spec, box, bu_eps, bu_order);
            json config{{"delta1", bu_d1}, {"delta2", bu_d2},
                        {"eps", bu_eps},   {"center", center},
                        {"box", boxv},     {"order", bu_order}};
            json rep = base_report("bump-approx", config);
            rep["degree"] = q.degree();
            rep["certified_error"] = q.certified_error();
            emit(rep, bu_out);
        } else if (*cmd_plot) {
            const json fj = io::read_json(pl_field);
            io::SvgScene scene;
            if (fj.contains("built"))
                scene.polygon = io::built_from_json(fj.at("built")).vertices;
            for (const auto& path : pl_trajs) {
                std::ifstream in(path);
                if (!in) throw std::runtime_error("cannot open " + path);
                std::string line;
                std::getline(in, line);  // header
                std::vector<Point2> pts;
                while (std::getline(in, line)) {
                    const auto v = parse_csv_doubles(line);
                    if (v.size() == 3) pts.push_back({v[1], v[2]});
                }
                scene.trajectories.push_back(std::move(pts));
            }
            if (!pl_cycles.empty()) {
                const json cj = io::read_json(pl_cycles);
                for (const auto& c : cj.at("cycles")) {
                    std::vector<Point2> pts;
                    for (const auto& p : c.at("orbit"))
                        pts.push_back({p[0].get<double>(), p[1].get<double>()});
                    scene.cycles.push_back(std::move(pts));
                }
            }
            io::write_text_atomic(pl_out, io::render_svg(scene));
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json err{{"tool", "polycycle"},
                 {"version", kVersion},
                 {"error", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 2;
    }
    return 0;
}
