#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "svg.hpp"

namespace ellipsum::cli {

struct RunConfig {
    std::string command;
    std::string input_path;
    std::string output_path;        // empty = standard output
    int grid_count = 0;             // 0 = per-dimension default
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::vector<double> ell;        // tangent direction components
    std::vector<int> axes;          // projection axes, 1-based
    std::string format;             // empty = per-command default
    int steps = 0;                  // target step / settling cap
};

inline int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::io_error:
        return 3;
    case ErrorCode::infeasible_regularizer:
    case ErrorCode::infeasible_base:
    case ErrorCode::kernel_violation:
    case ErrorCode::not_settled:
        return 2;
    default:
        return 1;
    }
}

namespace detail_cli {

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output_path.empty())
        out << text;
    else
        io::write_text_file(cfg.output_path, text);
}

inline std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

inline std::string pick_format(const RunConfig& cfg, const std::string& default_format,
                               std::initializer_list<const char*> allowed) {
    std::string f = cfg.format.empty() ? default_format : cfg.format;
    for (const char* a : allowed)
        if (f == a) return f;
    fail(ErrorCode::validation_error, "format \"" + f + "\" not supported by " + cfg.command);
}

inline DirectionGrid grid_for(const RunConfig& cfg, Eigen::Index dim) {
    int count = cfg.grid_count == 0 ? DirectionGrid::default_count(dim) : cfg.grid_count;
    return DirectionGrid::make(dim, count, cfg.seed);
}

inline void validate_common(const RunConfig& cfg) {
    require(cfg.tol > 0.0, ErrorCode::validation_error, "--tol must be positive");
    require(cfg.grid_count == 0 || cfg.grid_count >= 4, ErrorCode::validation_error,
            "--grid must be at least 4");
}

/// Output path with "_<a><b>" inserted before the extension.
inline std::string plane_path(const std::string& base, Eigen::Index a, Eigen::Index b) {
    std::string suffix = "_" + std::to_string(a + 1) + std::to_string(b + 1) + ".svg";
    auto dot = base.rfind('.');
    auto slash = base.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return base + suffix;
    return base.substr(0, dot) + suffix;
}

inline io::json tangent_report(const EllipsoidSum& s, const TangentBound& tb,
                               const DirectionGrid& grid, double tol) {
    Matrix zero = Matrix::Zero(s.dim(), s.dim());
    FeasibilityReport feas = verify_regularizer(s, zero, tb.direction, grid, tol);
    io::json j = io::bound_report_to_json(tb.ellipsoid, zero, feas);
    j["tangency_point"] = io::vector_to_json(tb.tangency_point);
    j["direction"] = io::vector_to_json(tb.direction.vec());
    return j;
}

inline int cmd_sum_boundary(const RunConfig& cfg, std::ostream& out) {
    EllipsoidSum s = io::parse_sum(io::load_json(cfg.input_path));
    std::string format = pick_format(cfg, "csv", {"csv", "json", "svg"});
    DirectionGrid grid = grid_for(cfg, s.dim());
    auto samples = sample_boundary(s, grid);
    if (format == "csv") {
        std::ostringstream csv;
        io::write_boundary_csv(csv, samples);
        emit(cfg, csv.str(), out);
    } else if (format == "json") {
        emit(cfg, dump(io::samples_to_json(samples)), out);
    } else {
        require(s.dim() == 2, ErrorCode::bad_axes, "svg output needs 2-D input (see reach --axes)");
        emit(cfg, svg::render_svg({svg::samples_curve(samples, "exact boundary")}), out);
    }
    return 0;
}

inline int cmd_bound_min_trace(const RunConfig& cfg, std::ostream& out) {
    EllipsoidSum s = io::parse_sum(io::load_json(cfg.input_path));
    std::string format = pick_format(cfg, "json", {"json", "svg"});
    DirectionGrid grid = grid_for(cfg, s.dim());
    Ellipsoid bound = min_trace_bound(s);
    Matrix zero = Matrix::Zero(s.dim(), s.dim());
    FeasibilityReport feas = verify_regularizer(s, zero, bound.shape(), grid, cfg.tol);
    if (format == "json") {
        emit(cfg, dump(io::bound_report_to_json(bound, zero, feas)), out);
    } else {
        require(s.dim() == 2, ErrorCode::bad_axes, "svg output needs 2-D input");
        auto samples = sample_boundary(s, grid);
        emit(cfg,
             svg::render_svg({svg::samples_curve(samples, "exact boundary"),
                              svg::ellipse_curve(bound, "min-trace bound")}),
             out);
    }
    return 0;
}

inline int cmd_bound_tangent(const RunConfig& cfg, std::ostream& out) {
    EllipsoidSum s = io::parse_sum(io::load_json(cfg.input_path));
    std::string format = pick_format(cfg, "json", {"json", "svg"});
    require(!cfg.ell.empty(), ErrorCode::validation_error, "--ell is required for bound-tangent");
    require(static_cast<Eigen::Index>(cfg.ell.size()) == s.dim(), ErrorCode::dimension_mismatch,
            "--ell must have one component per dimension");
    Vector l(static_cast<Eigen::Index>(cfg.ell.size()));
    for (std::size_t i = 0; i < cfg.ell.size(); ++i) l(static_cast<Eigen::Index>(i)) = cfg.ell[i];
    Direction dir = Direction::normalized(l);
    DirectionGrid grid = grid_for(cfg, s.dim());
    TangentBound tb = tangent_bound(s, dir);
    if (format == "json") {
        emit(cfg, dump(tangent_report(s, tb, grid, cfg.tol)), out);
    } else {
        require(s.dim() == 2, ErrorCode::bad_axes, "svg output needs 2-D input");
        auto samples = sample_boundary(s, grid);
        emit(cfg,
             svg::render_svg({svg::samples_curve(samples, "exact boundary"),
                              svg::ellipse_curve(tb.ellipsoid, "tangent bound")}),
             out);
    }
    return 0;
}

inline int cmd_bound_refine_q0(const RunConfig& cfg, std::ostream& out) {
    EllipsoidSum s = io::parse_sum(io::load_json(cfg.input_path));
    std::string format = pick_format(cfg, "json", {"json", "svg"});
    DirectionGrid grid = grid_for(cfg, s.dim());
    Ellipsoid base = min_trace_bound(s);
    RefineOptions opts;
    opts.tol = cfg.tol;
    RegularizerMatrix reg = refine_q0(s, base, grid, opts);
    Ellipsoid refined(Matrix(base.shape() + reg.q0), base.center());
    if (format == "json") {
        emit(cfg, dump(io::bound_report_to_json(refined, reg.q0, reg.certificate)), out);
    } else {
        require(s.dim() == 2, ErrorCode::bad_axes, "svg output needs 2-D input");
        auto samples = sample_boundary(s, grid);
        emit(cfg,
             svg::render_svg({svg::samples_curve(samples, "exact boundary"),
                              svg::ellipse_curve(base, "min-trace bound"),
                              svg::ellipse_curve(refined, "refined bound")}),
             out);
    }
    return 0;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
    io::json j = io::load_json(cfg.input_path);
    Ellipsoid bound = io::parse_ellipsoid(io::field(j, "bound", "input"), "input.bound");
    EllipsoidSum s = io::parse_sum(j);
    pick_format(cfg, "json", {"json"});
    DirectionGrid grid = grid_for(cfg, s.dim());
    ContainmentReport report = check_containment(bound, s, grid, cfg.tol);
    emit(cfg, dump(io::containment_to_json(report, grid)), out);
    return report.contained_on_grid ? 0 : 2;
}

inline int cmd_reach(const RunConfig& cfg, std::ostream& out) {
    LtvSystem system = io::parse_system(io::load_json(cfg.input_path));
    require(cfg.steps >= 2, ErrorCode::validation_error, "--steps must give a target step >= 2");
    ReachSpec spec(system, cfg.steps);
    EllipsoidSum s = reach_sum(spec);
    std::string format = pick_format(cfg, "csv", {"csv", "json", "svg"});
    if (format != "svg") {
        DirectionGrid grid = grid_for(cfg, s.dim());
        auto samples = sample_boundary(s, grid);
        if (format == "csv") {
            std::ostringstream csv;
            io::write_boundary_csv(csv, samples);
            emit(cfg, csv.str(), out);
        } else {
            emit(cfg, dump(io::samples_to_json(samples)), out);
        }
        return 0;
    }

    Ellipsoid bound = min_trace_bound(s);
    auto render_plane = [&](Eigen::Index a, Eigen::Index b) {
        EllipsoidSum flat = project_to_plane(s, a, b);
        DirectionGrid grid2 = DirectionGrid::make(
            2, cfg.grid_count == 0 ? DirectionGrid::default_count(2) : cfg.grid_count, cfg.seed);
        auto samples = sample_boundary(flat, grid2);
        svg::SvgOptions style;
        style.title = "reachable set, axes " + std::to_string(a + 1) + "-" + std::to_string(b + 1);
        return svg::render_svg({svg::samples_curve(samples, "exact boundary"),
                                svg::ellipse_curve(project_to_plane(bound, a, b), "min-trace bound")},
                               style);
    };

    if (!cfg.axes.empty()) {
        require(cfg.axes.size() == 2, ErrorCode::bad_axes, "--axes takes exactly two indices");
        Eigen::Index a = cfg.axes[0] - 1, b = cfg.axes[1] - 1;  // user axes are 1-based
        emit(cfg, render_plane(a, b), out);
        return 0;
    }
    if (s.dim() == 2) {
        emit(cfg, render_plane(0, 1), out);
        return 0;
    }
    require(s.dim() == 3, ErrorCode::bad_axes, "give --axes for systems beyond 3 states");
    require(!cfg.output_path.empty(), ErrorCode::validation_error,
            "--out is required for multi-plane svg output");
    for (auto [a, b] : {std::pair<Eigen::Index, Eigen::Index>{0, 1}, {0, 2}, {1, 2}})
        io::write_text_file(plane_path(cfg.output_path, a, b), render_plane(a, b));
    return 0;
}

inline int cmd_reach_bound(const RunConfig& cfg, std::ostream& out) {
    LtvSystem system = io::parse_system(io::load_json(cfg.input_path));
    require(cfg.steps >= 2, ErrorCode::validation_error, "--steps must give a target step >= 2");
    pick_format(cfg, "json", {"json"});
    ReachSpec spec(system, cfg.steps);
    EllipsoidSum s = reach_sum(spec);
    Ellipsoid bound = min_trace_bound(s);
    DirectionGrid grid = grid_for(cfg, s.dim());
    Matrix zero = Matrix::Zero(s.dim(), s.dim());
    FeasibilityReport feas = verify_regularizer(s, zero, bound.shape(), grid, cfg.tol);
    emit(cfg, dump(io::bound_report_to_json(bound, zero, feas)), out);
    return 0;
}

inline int cmd_settle(const RunConfig& cfg, std::ostream& out) {
    LtvSystem system = io::parse_system(io::load_json(cfg.input_path));
    pick_format(cfg, "json", {"json"});
    int cap = cfg.steps > 0 ? cfg.steps : 10000;
    int k_star = settling_horizon(system, cfg.tol, cap);
    BoundednessReport bd = boundedness_check(system, std::max(3, k_star), cfg.tol);
    io::json j{{"settling_step", k_star},
               {"tol", cfg.tol},
               {"cap", cap},
               {"definition",
                "smallest k whose next-oldest input contribution "
                "sum_i sqrt(tr(A^{k-1} B_i R_i B_i' A'^{k-1})) drops below tol times "
                "the accumulated trace root of the reach bound at step k"},
               {"boundedness", io::boundedness_to_json(bd)}};
    emit(cfg, dump(j), out);
    return 0;
}

} // namespace detail_cli

/// Parses and executes one command line. Writes artifacts to --out (or the
/// given stream), machine-readable errors to the error stream. Returns the
/// process exit code: 0 ok, 1 validation, 2 infeasible, 3 i/o.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    RunConfig cfg;
    CLI::App app{"ellipsoidal calculus: exact geometric-sum boundaries, outer bounds, reach sets"};
    app.require_subcommand(1);
    app.fallthrough(false);

    auto add_common = [&](CLI::App* sub, bool needs_input = true) {
        auto* in = sub->add_option("--in", cfg.input_path, "input JSON path");
        if (needs_input) in->required();
        sub->add_option("--out", cfg.output_path, "output path (default: stdout)");
        sub->add_option("--grid", cfg.grid_count, "direction-grid size (0 = per-dimension default)");
        sub->add_option("--seed", cfg.seed, "seed for randomized direction grids");
        sub->add_option("--tol", cfg.tol, "numerical tolerance");
        sub->add_option("--format", cfg.format, "output format: json|csv|svg");
        return sub;
    };

    auto* sum_boundary = add_common(app.add_subcommand("sum-boundary", "exact boundary sweep of a geometric sum"));
    (void)sum_boundary;
    auto* tangent = add_common(app.add_subcommand("bound-tangent", "tight outer bound touching at a direction"));
    tangent->add_option("--ell", cfg.ell, "tangency direction components")->expected(-1);
    add_common(app.add_subcommand("bound-min-trace", "minimum-trace outer bound"));
    add_common(app.add_subcommand("bound-refine-q0", "search a trace-reducing regularizer"));
    add_common(app.add_subcommand("check", "grid containment check of a candidate bound"));
    auto* reach = add_common(app.add_subcommand("reach", "exact reachable-set boundary"));
    reach->add_option("--steps", cfg.steps, "target step k (states reachable at step k)");
    reach->add_option("--axes", cfg.axes, "projection plane, 1-based axis pair")->expected(2);
    auto* reach_bound = add_common(app.add_subcommand("reach-bound", "minimum-trace reach bound"));
    reach_bound->add_option("--steps", cfg.steps, "target step k");
    auto* settle = add_common(app.add_subcommand("settle", "settling horizon and boundedness diagnostics"));
    settle->add_option("--steps", cfg.steps, "search cap (default 10000)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << io::json{{"error", {{"code", "parse_error"}, {"message", e.what()}}}}.dump(2) << "\n";
        return 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        detail_cli::validate_common(cfg);
        if (cfg.command == "sum-boundary") return detail_cli::cmd_sum_boundary(cfg, out);
        if (cfg.command == "bound-tangent") return detail_cli::cmd_bound_tangent(cfg, out);
        if (cfg.command == "bound-min-trace") return detail_cli::cmd_bound_min_trace(cfg, out);
        if (cfg.command == "bound-refine-q0") return detail_cli::cmd_bound_refine_q0(cfg, out);
        if (cfg.command == "check") return detail_cli::cmd_check(cfg, out);
        if (cfg.command == "reach") return detail_cli::cmd_reach(cfg, out);
        if (cfg.command == "reach-bound") return detail_cli::cmd_reach_bound(cfg, out);
        if (cfg.command == "settle") return detail_cli::cmd_settle(cfg, out);
        fail(ErrorCode::validation_error, "unknown command: " + cfg.command);
    } catch (const Error& e) {
        err << io::json{{"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}}.dump(2)
            << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << io::json{{"error", {{"code", "validation_error"}, {"message", e.what()}}}}.dump(2)
            << "\n";
        return 1;
    }
}

inline int run(int argc, const char* const* argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

} // namespace ellipsum::cli
