#include <catch2/catch_amalgamated.hpp>

#include <ellipsum/io.hpp>
#include <ellipsum/svg.hpp>

#include "test_support.hpp"

#include <cstdlib>
#include <sstream>

using namespace ellipsum;
using io::json;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("ellipsoid records round-trip bit for bit") {
    ts::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Ellipsoid e = rng.ellipsoid(1 + trial % 5, /*zero_center=*/false);
        json j = json::parse(io::ellipsoid_to_json(e).dump());
        Ellipsoid back = io::parse_ellipsoid(j);
        CHECK(back.shape() == e.shape());
        CHECK(back.center() == e.center());
    }
}

TEST_CASE("record parsing rejects malformed input") {
    auto parse = [](const char* text) { return io::parse_ellipsoid(json::parse(text)); };
    CHECK_THROWS_AS(parse(R"({"shape": [[1,0],[0,1]]})"), Error);               // missing center
    CHECK_THROWS_AS(parse(R"({"center": [0,0]})"), Error);                      // missing shape
    CHECK_THROWS_AS(parse(R"({"center": [0,0], "shape": [[1,0],[0]]})"), Error);  // ragged
    CHECK_THROWS_AS(parse(R"({"center": [0,0], "shape": [[1,0]]})"), Error);    // non-square
    CHECK_THROWS_AS(parse(R"({"center": [0,0], "shape": "x"})"), Error);        // wrong type
    CHECK_THROWS_AS(parse(R"({"center": [0,0,0], "shape": [[1,0],[0,1]]})"), Error);
    CHECK_THROWS_AS(parse(R"({"center": [0,0], "shape": [[1,2],[2,1]]})"), Error);  // indefinite
    CHECK_THROWS_AS(io::parse_sum(json::parse(R"({"ellipsoids": []})")), Error);
}

TEST_CASE("system records parse both broadcast and per-step forms") {
    json lti = json::parse(R"({
        "A": [[0.5, 0], [0, 0.5]],
        "inputs": [{"B": [[1, 0], [0, 1]], "R": [[1, 0], [0, 1]]}],
        "horizon": 4})");
    LtvSystem sys = io::parse_system(lti);
    CHECK(sys.is_lti());
    CHECK(sys.horizon() == 4);
    CHECK(sys.state_dim() == 2);

    json ltv = json::parse(R"({
        "A": [[[1, 0], [0, 1]], [[0.5, 0], [0, 0.5]]],
        "inputs": [{"B": [[1, 0], [0, 1]], "R": [[[1, 0], [0, 1]], [[2, 0], [0, 2]]]}],
        "horizon": 2})");
    LtvSystem sys2 = io::parse_system(ltv);
    CHECK_FALSE(sys2.is_lti());
    CHECK(sys2.input_shape(0, 2)(0, 0) == 2.0);

    CHECK_THROWS_AS(io::parse_system(json::parse(R"({"A": [[1]], "inputs": []})")), Error);
    CHECK_THROWS_AS(
        io::parse_system(json::parse(
            R"({"A": [[[1]], [[1]], [[1]]], "inputs": [{"B": [[1]], "R": [[1]]}], "horizon": 2})")),
        Error);
}

TEST_CASE("bound reports expose the documented fields") {
    auto s = ts::demo_sum();
    Ellipsoid bound = min_trace_bound(s);
    Matrix zero = Matrix::Zero(2, 2);
    auto grid = DirectionGrid::make(2, 720);
    json j = io::bound_report_to_json(bound, zero, verify_regularizer(s, zero, bound.shape(), grid));
    CHECK(j.contains("shape"));
    CHECK(j.contains("center"));
    CHECK(j.contains("trace"));
    CHECK(j.contains("q0"));
    CHECK(j["feasibility"].contains("pd_ok"));
    CHECK(j["feasibility"].contains("support_ok"));
    CHECK(j["feasibility"].contains("min_margin"));
    CHECK(j["feasibility"]["grid_count"] == 720);
    CHECK(io::parse_matrix(j["shape"], "shape") == bound.shape());
}

TEST_CASE("boundary csv uses full precision and round-trips") {
    auto s = ts::demo_sum();
    auto samples = sample_boundary(s, DirectionGrid::make(2, 16));
    std::ostringstream out;
    io::write_boundary_csv(out, samples);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "l1,l2,x1,x2,support");
    for (const auto& sample : samples) {
        std::string line;
        REQUIRE(std::getline(in, line));
        std::istringstream cells(line);
        std::string cell;
        double values[5];
        for (double& v : values) {
            REQUIRE(std::getline(cells, cell, ','));
            v = std::strtod(cell.c_str(), nullptr);
        }
        CHECK(values[0] == sample.direction[0]);
        CHECK(values[1] == sample.direction[1]);
        CHECK(values[2] == sample.point(0));
        CHECK(values[3] == sample.point(1));
        CHECK(values[4] == sample.support);
    }
}

TEST_CASE("svg rendering is deterministic and structured") {
    Ellipsoid disk(Matrix(Matrix::Identity(2, 2)));
    auto circle = svg::ellipse_curve(disk, "unit circle");
    SECTION("single closed path with the expected span") {
        std::string doc = svg::render_svg({circle});
        CHECK_THAT(doc, ContainsSubstring("<svg"));
        CHECK_THAT(doc, ContainsSubstring("Z\" fill=\"none\""));
        CHECK_THAT(doc, ContainsSubstring("unit circle"));
        CHECK_THAT(doc, ContainsSubstring(">-1<"));  // axis tick labels at the data bounds
        CHECK_THAT(doc, ContainsSubstring(">1<"));
        CHECK(std::count(doc.begin(), doc.end(), '\n') > 5);
    }
    SECTION("byte-identical across calls") {
        auto samples = sample_boundary(ts::demo_sum(), DirectionGrid::make(2, 360));
        std::vector<svg::Curve> curves{svg::samples_curve(samples, "exact boundary"),
                                       svg::ellipse_curve(min_trace_bound(ts::demo_sum()), "bound")};
        CHECK(svg::render_svg(curves) == svg::render_svg(curves));
    }
    SECTION("empty plots are rejected") {
        CHECK_THROWS_MATCHES(svg::render_svg({}), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == ErrorCode::empty_plot;
                             }));
        CHECK_THROWS_AS(svg::render_svg({svg::Curve{"empty", {}, true}}), Error);
    }
    SECTION("one path per curve plus legend swatches") {
        auto doc = svg::render_svg({circle, svg::ellipse_curve(Ellipsoid(Matrix(4.0 * Matrix::Identity(2, 2))), "outer")});
        std::size_t paths = 0;
        for (std::size_t pos = doc.find("<path"); pos != std::string::npos;
             pos = doc.find("<path", pos + 1))
            ++paths;
        CHECK(paths == 2);
    }
}
