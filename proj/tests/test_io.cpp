#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "support/oracles.hpp"
#include "vcert/io.hpp"

using namespace vcert;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const char* identity_family = R"({"mode": "matrix-family", "dimension": 2, "columns": [[[1, 0]], [[0, 1]]]})";

const char* quad_patch = R"({
  "mode": "bb-patch", "dimension": 2, "degrees": [1, 1],
  "control_points": [[[0, 0], [0, 1]], [[1, 0], [2, 2]]]
})";

const char* collapsed_patch = R"({
  "mode": "bb-patch", "dimension": 2, "degrees": [1, 1],
  "control_points": [[[0, 0], [1, 1]], [[1, 1], [2, 2]]]
})";

const char* identity_grid = R"({
  "mode": "bb-grid", "dimension": 2, "breakpoints": [[0, 0.5, 1], [0, 1]],
  "patches": [
    {"cell": [1, 0], "degrees": [1, 1], "control_points": [[[0.5, 0], [0.5, 1]], [[1, 0], [1, 1]]]},
    {"cell": [0, 0], "degrees": [1, 1], "control_points": [[[0, 0], [0, 1]], [[0.5, 0], [0.5, 1]]]}
  ]
})";

std::string parse_error_path(const std::string& text)
{
    try {
        parse_input(text);
    } catch (const ParseError& e) {
        return e.path();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("parse_input examples", "[io]")
{
    const auto fam = parse_input(identity_family);
    CHECK(fam.mode == InputMode::MatrixFamily);
    CHECK(fam.dimension == 2);
    REQUIRE(fam.columns.size() == 2);
    CHECK(fam.columns[1].column == 1);
    CHECK(fam.columns[1].vectors == std::vector<Vector>{{0, 1}});
    CHECK(fam.options == InputOptions{});

    const auto quad = parse_input(quad_patch);
    CHECK(quad.mode == InputMode::BbPatch);
    REQUIRE(quad.grid.cell_count() == 1);
    CHECK(quad.grid.patches()[0] == vcert::testing::bilinear({0, 0}, {1, 0}, {0, 1}, {2, 2}));
    CHECK(quad.grid.patches()[0].point_count() == 4);

    // cells listed out of order land in row-major position
    const auto grid = parse_input(identity_grid);
    REQUIRE(grid.grid.cell_count() == 2);
    CHECK(grid.grid.patches()[0].point(std::size_t{0})[0] == 0.0);
    CHECK(grid.grid.patches()[1].point(std::size_t{0})[0] == 0.5);
}

TEST_CASE("parse_input errors name the offending field", "[io]")
{
    const std::string three = R"({"mode": "bb-patch", "dimension": 2, "degrees": [1, 1],
        "control_points": [[[0, 0], [0, 1]], [[1, 0, 7], [1, 1]]]})";
    try {
        parse_input(three);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.path() == "control_points[1][0]");
        CHECK_THAT(std::string(e.what()), ContainsSubstring("shape mismatch"));
        CHECK_THAT(std::string(e.what()), ContainsSubstring("control_points[1][0]"));
    }

    CHECK(parse_error_path(R"({"mode": "matrix-family", "dimension": 2, "columns": [[[1, 0]], [[0, 1]]], "extra": 1})")
          == "extra");
    CHECK(parse_error_path(R"({"mode": "warp", "dimension": 2})") == "mode");
    CHECK(parse_error_path(R"({"mode": "matrix-family", "columns": []})") == "dimension");
    CHECK(parse_error_path(R"({"mode": "matrix-family", "dimension": 2, "columns": [[[1, 0]]]})") == "columns");
    CHECK(parse_error_path(R"({"mode": "matrix-family", "dimension": 2, "columns": [[[1, 0]], [[0, "x"]]]})")
          == "columns[1][0][1]");
    // overflow is caught by the JSON reader, before any field is visited
    CHECK_THROWS_WITH(parse_input(R"({"mode": "matrix-family", "dimension": 2, "columns": [[[1, 0]], [[0, 1e400]]]})"),
                      ContainsSubstring("non-finite"));
    CHECK(parse_error_path(R"({"mode": "matrix-family", "dimension": 2, "columns": [[[1, 0]], []]})") == "columns[1]");
    CHECK(parse_error_path(R"({"mode": "matrix-family", "dimension": 2, "options": {"delta": -1},
        "columns": [[[1, 0]], [[0, 1]]]})") == "options.delta");
    CHECK(parse_error_path(R"({"mode": "matrix-family", "dimension": 2, "options": {"format": "xml"},
        "columns": [[[1, 0]], [[0, 1]]]})") == "options.format");
    CHECK(parse_error_path(R"({"mode": "bb-patch", "dimension": 2, "degrees": [1],
        "control_points": []})") == "degrees");
    CHECK(parse_error_path(R"({"mode": "bb-grid", "dimension": 1, "breakpoints": [[0, 0.5, 0.5, 1]],
        "patches": []})") == "breakpoints[0][2]");
    CHECK(parse_error_path(R"({"mode": "bb-grid", "dimension": 1, "breakpoints": [[0, 1]],
        "patches": [{"cell": [0], "degrees": [1], "control_points": [[0], [1]]},
                    {"cell": [0], "degrees": [1], "control_points": [[0], [1]]}]})") == "patches");
    CHECK(parse_error_path(R"({"mode": "bb-grid", "dimension": 1, "breakpoints": [[0, 0.5, 1]],
        "patches": [{"cell": [0], "degrees": [1], "control_points": [[0], [1]]},
                    {"cell": [0], "degrees": [1], "control_points": [[0], [1]]}]})") == "patches[1].cell");
    CHECK(parse_error_path("[1, 2]") == "");
    CHECK_THROWS_AS(parse_input("{not json"), ParseError);
}

TEST_CASE("run examples", "[io]")
{
    const auto grid = run(parse_input(identity_grid));
    CHECK(grid.verdict == Verdict::StrictVFamily);
    CHECK(grid.provenance == Provenance::MultiPatch);

    const auto col = run(parse_input(collapsed_patch));
    CHECK(col.verdict == Verdict::NotCertified);
    REQUIRE(col.patterns.size() == 2);
    CHECK(col.patterns[1].pattern.str() == "(+,-)");
    CHECK(col.patterns[1].status == PatternStatus::NotStrict);
    CHECK(norm2(col.patterns[1].witness_sum) <= 1e-9);

    const auto quad = run(parse_input(quad_patch));
    CHECK(quad.verdict == Verdict::StrictVFamily);
    REQUIRE(quad.patterns.size() == 2);
    REQUIRE(quad.patterns[1].certificate);
    CHECK_THAT(quad.patterns[1].certificate->epsilon, WithinAbs(1.0 / std::sqrt(10.0), 1e-7));
    for (const auto& p : quad.patterns) CHECK(p.certificate.has_value());

    CHECK(exit_code(grid) == 0);
    CHECK(exit_code(col) == 1);
}

TEST_CASE("emit_report examples", "[io]")
{
    const auto id = run(parse_input(identity_family));
    CHECK_THAT(emit_report(id, ReportFormat::Text), ContainsSubstring("verdict: STRICT-V-FAMILY\n"));

    const auto j = nlohmann::json::parse(emit_report(id, ReportFormat::Structured));
    CHECK(j["verdict"] == "strict-v-family");
    CHECK(j["patterns"].size() == 2);
    CHECK(j["degenerate"].is_null());

    const auto deg = run(parse_input(R"({"mode": "matrix-family", "dimension": 2, "columns": [[[0, 0]], [[0, 1]]]})"));
    CHECK(deg.verdict == Verdict::Degenerate);
    CHECK_THAT(emit_report(deg, ReportFormat::Text), ContainsSubstring("DEGENERATE column 1"));
    CHECK(exit_code(deg) != 0);
    const auto dj = nlohmann::json::parse(emit_report(deg, ReportFormat::Structured));
    CHECK(dj["degenerate"]["column"] == 1);

    const std::string col = emit_report(run(parse_input(collapsed_patch)), ReportFormat::Text);
    CHECK_THAT(col, ContainsSubstring("verdict: NOT-CERTIFIED"));
    CHECK_THAT(col, ContainsSubstring("witness (+,-)"));
    CHECK_THAT(col, ContainsSubstring("NOT-STRICT"));
}

TEST_CASE("structured reports are deterministic", "[io]")
{
    for (const char* text : {identity_family, quad_patch, collapsed_patch, identity_grid}) {
        const auto a = emit_report(run(parse_input(text)), ReportFormat::Structured);
        const auto b = emit_report(run(parse_input(text)), ReportFormat::Structured);
        REQUIRE(a == b);
    }
}

TEST_CASE("structured report floats round-trip", "[io]")
{
    const auto rep = run(parse_input(quad_patch));
    const auto j = nlohmann::json::parse(emit_report(rep, ReportFormat::Structured));
    for (std::size_t p = 0; p < rep.patterns.size(); ++p) {
        REQUIRE(j["patterns"][p]["lp_margin"].get<double>() == rep.patterns[p].lp_margin);
        REQUIRE(j["patterns"][p]["certificate"]["epsilon"].get<double>() == rep.patterns[p].certificate->epsilon);
    }
}

namespace {

InputOptions random_options(CounterRng& rng)
{
    InputOptions o;
    o.delta = std::exp(rng.uniform(-30.0, -1.0));
    o.threshold = rng.uniform(0.0, 1e-3);
    o.format = rng.uniform() < 0.5 ? ReportFormat::Text : ReportFormat::Structured;
    return o;
}

} // namespace

TEST_CASE("parse_input inverts emit_input", "[io][property]")
{
    const std::uint64_t seed = 4242;
    INFO("seed " << seed);
    CounterRng rng(seed);
    for (int trial = 0; trial < 300; ++trial) {
        InputDocument doc;
        doc.dimension = 1 + rng.next() % 3;
        doc.options = random_options(rng);
        const std::size_t n = doc.dimension;
        switch (trial % 3) {
        case 0:
            doc.mode = InputMode::BbPatch;
            doc.grid = PatchGrid::single(vcert::testing::random_net(rng, n, 3));
            break;
        case 1: {
            doc.mode = InputMode::BbGrid;
            std::vector<Vector> bps;
            std::size_t cells = 1;
            for (std::size_t k = 0; k < n; ++k) {
                Vector bp{0.0};
                const std::size_t pieces = 1 + rng.next() % 3;
                for (std::size_t i = 1; i < pieces; ++i) bp.push_back(bp.back() + rng.uniform(0.01, 1.0 / pieces));
                bp.push_back(1.0);
                cells *= pieces;
                bps.push_back(bp);
            }
            std::vector<ControlNet> nets;
            for (std::size_t c = 0; c < cells; ++c) nets.push_back(vcert::testing::random_net(rng, n, 2));
            doc.grid = PatchGrid(std::move(bps), std::move(nets));
            break;
        }
        default:
            doc.mode = InputMode::MatrixFamily;
            for (std::size_t i = 0; i < n; ++i) {
                GeneratorSet g{i, {}};
                const std::size_t count = 1 + rng.next() % 4;
                for (std::size_t k = 0; k < count; ++k) {
                    Vector v(n);
                    for (auto& x : v) x = rng.uniform(-1e3, 1e3) * std::exp(rng.uniform(-20.0, 20.0));
                    g.vectors.push_back(v);
                }
                doc.columns.push_back(std::move(g));
            }
        }
        INFO("trial " << trial << " mode " << to_string(doc.mode));
        const InputDocument back = parse_input(emit_input(doc));
        REQUIRE(back == doc);
    }
}
