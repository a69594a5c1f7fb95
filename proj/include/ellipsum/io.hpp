#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "minkowski.hpp"
#include "reachset.hpp"

namespace ellipsum::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON -> numeric types

inline double number_at(const json& j, const std::string& where) {
    require(j.is_number(), ErrorCode::parse_error, where + ": expected a number");
    return j.get<double>();
}

inline Vector parse_vector(const json& j, const std::string& where) {
    require(j.is_array() && !j.empty(), ErrorCode::parse_error, where + ": expected a non-empty array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = number_at(j[i], where);
    return v;
}

inline Matrix parse_matrix(const json& j, const std::string& where) {
    require(j.is_array() && !j.empty(), ErrorCode::parse_error, where + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    require(j[0].is_array() && !j[0].empty(), ErrorCode::parse_error, where + ": rows must be non-empty arrays");
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        require(j[r].is_array() && j[r].size() == cols, ErrorCode::parse_error,
                where + ": rows must all have the same length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number_at(j[r][c], where);
    }
    return m;
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    require(j.is_object(), ErrorCode::parse_error, where + ": expected an object");
    auto it = j.find(key);
    require(it != j.end(), ErrorCode::parse_error, where + ": missing field \"" + key + "\"");
    return *it;
}

// ---------------------------------------------------------------------------
// Ellipsoid record: {"center": [...], "shape": [[...], ...]}

inline Ellipsoid parse_ellipsoid(const json& j, const std::string& where = "ellipsoid") {
    Matrix shape = parse_matrix(field(j, "shape", where), where + ".shape");
    Vector center = parse_vector(field(j, "center", where), where + ".center");
    return Ellipsoid(std::move(shape), std::move(center));
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline json ellipsoid_to_json(const Ellipsoid& e) {
    return json{{"center", vector_to_json(e.center())}, {"shape", matrix_to_json(e.shape())}};
}

inline EllipsoidSum parse_sum(const json& j, const std::string& where = "input") {
    const json& arr = field(j, "ellipsoids", where);
    require(arr.is_array() && !arr.empty(), ErrorCode::parse_error,
            where + ".ellipsoids: expected a non-empty array");
    std::vector<Ellipsoid> terms;
    terms.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        terms.push_back(parse_ellipsoid(arr[i], where + ".ellipsoids[" + std::to_string(i) + "]"));
    return EllipsoidSum(std::move(terms));
}

// ---------------------------------------------------------------------------
// System record:
// {"A": matrix | [matrix, ...], "inputs": [{"B": ..., "R": ...}, ...], "horizon": K}
// Single matrices broadcast over steps (time-invariant); lists must have
// exactly `horizon` entries.

inline std::vector<Matrix> parse_matrix_or_list(const json& j, const std::string& where) {
    require(j.is_array() && !j.empty(), ErrorCode::parse_error, where + ": expected matrix or list of matrices");
    if (j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
        std::vector<Matrix> out;
        out.reserve(j.size());
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(parse_matrix(j[i], where + "[" + std::to_string(i) + "]"));
        return out;
    }
    return {parse_matrix(j, where)};
}

inline LtvSystem parse_system(const json& j, const std::string& where = "system") {
    const json& jh = field(j, "horizon", where);
    require(jh.is_number_integer() && jh.get<long>() >= 1, ErrorCode::parse_error,
            where + ".horizon: expected a positive integer");
    int horizon = jh.get<int>();
    std::vector<Matrix> dynamics = parse_matrix_or_list(field(j, "A", where), where + ".A");
    const json& jin = field(j, "inputs", where);
    require(jin.is_array() && !jin.empty(), ErrorCode::parse_error,
            where + ".inputs: expected a non-empty array");
    std::vector<InputChannel> channels;
    channels.reserve(jin.size());
    for (std::size_t i = 0; i < jin.size(); ++i) {
        std::string w = where + ".inputs[" + std::to_string(i) + "]";
        channels.push_back(InputChannel{parse_matrix_or_list(field(jin[i], "B", w), w + ".B"),
                                        parse_matrix_or_list(field(jin[i], "R", w), w + ".R")});
    }
    return LtvSystem(std::move(dynamics), std::move(channels), horizon);
}

// ---------------------------------------------------------------------------
// Reports

inline json feasibility_to_json(const FeasibilityReport& r) {
    json j{{"pd_ok", r.pd_ok},
           {"support_ok", r.support_ok},
           {"min_margin", r.min_margin},
           {"grid_count", r.grid_count}};
    if (r.kernel_ok.has_value()) j["kernel_ok"] = *r.kernel_ok;
    return j;
}

inline json bound_report_to_json(const Ellipsoid& bound, const Matrix& q0,
                                 const FeasibilityReport& feasibility) {
    return json{{"shape", matrix_to_json(bound.shape())},
                {"center", vector_to_json(bound.center())},
                {"trace", bound.trace()},
                {"q0", matrix_to_json(q0)},
                {"feasibility", feasibility_to_json(feasibility)}};
}

inline json containment_to_json(const ContainmentReport& r, const DirectionGrid& grid) {
    json margins = json::array();
    for (double m : r.margins) margins.push_back(m);
    return json{{"contained_on_grid", r.contained_on_grid},
                {"min_margin", r.min_margin},
                {"min_direction", vector_to_json(grid[r.min_index].vec())},
                {"tol", r.tol},
                {"grid_count", static_cast<int>(grid.size())},
                {"margins", std::move(margins)}};
}

inline json boundedness_to_json(const BoundednessReport& r) {
    json ratios = json::array();
    for (double x : r.ratio_estimates)
        ratios.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    json j{{"trace_roots", r.trace_roots},
           {"increments", r.increments},
           {"ratio_estimates", std::move(ratios)},
           {"spectral_radius_max", r.spectral_radius_max},
           {"converged", r.converged},
           {"tol", r.tol}};
    j["settling_step"] = r.settling_step.has_value() ? json(*r.settling_step) : json(nullptr);
    return j;
}

inline json samples_to_json(const std::vector<BoundarySample>& samples) {
    json arr = json::array();
    for (const auto& s : samples)
        arr.push_back(json{{"direction", vector_to_json(s.direction.vec())},
                           {"point", vector_to_json(s.point)},
                           {"support", s.support}});
    return json{{"samples", std::move(arr)}};
}

// ---------------------------------------------------------------------------
// CSV boundary export: header l1,..,l<n>,x1,..,x<n>,support; 17 significant
// digits so values round-trip exactly.

inline void write_boundary_csv(std::ostream& out, const std::vector<BoundarySample>& samples) {
    require(!samples.empty(), ErrorCode::validation_error, "no samples to write");
    const Eigen::Index n = samples.front().direction.dim();
    for (Eigen::Index i = 0; i < n; ++i) out << "l" << (i + 1) << ",";
    for (Eigen::Index i = 0; i < n; ++i) out << "x" << (i + 1) << ",";
    out << "support\n";
    for (const auto& s : samples) {
        for (Eigen::Index i = 0; i < n; ++i) out << detail::fmt17(s.direction[i]) << ",";
        for (Eigen::Index i = 0; i < n; ++i) out << detail::fmt17(s.point(i)) << ",";
        out << detail::fmt17(s.support) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Files

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io_error, "cannot open input file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::parse_error, std::string("invalid JSON: ") + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::io_error, "cannot open output file: " + path);
    out << content;
    require(out.good(), ErrorCode::io_error, "failed writing output file: " + path);
}

} // namespace ellipsum::io
