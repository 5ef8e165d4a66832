#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "vcert/certify.hpp"
#include "vcert/oracle.hpp"

using namespace vcert;
using vcert::testing::bilinear;
using Catch::Matchers::WithinAbs;

namespace {

ControlNet identity_net() { return bilinear({0, 0}, {1, 0}, {0, 1}, {1, 1}); }
ControlNet collapsed_net() { return bilinear({0, 0}, {1, 1}, {1, 1}, {2, 2}); }
ControlNet folded_net() { return bilinear({0, 0}, {1, 0}, {0, 1}, {0.1, 0.1}); }

} // namespace

TEST_CASE("sampled_injectivity examples", "[oracle]")
{
    const auto id = sampled_injectivity(identity_net(), 1000, 1);
    CHECK_FALSE(id.collided);
    CHECK(id.trials == 1000);
    CHECK(id.seed == 1);

    CHECK(norm2(difference(evaluate(collapsed_net(), Vector{0.3, 0.2}), evaluate(collapsed_net(), Vector{0.2, 0.3})))
          <= 1e-15);
    const auto col = sampled_injectivity(collapsed_net(), 1000, 1);
    REQUIRE(col.collided);
    const auto& w = *col.witness;
    CHECK(norm2(difference(w.fu, w.fv)) <= 1e-9);
    CHECK(norm2(difference(w.u, w.v)) >= 1e-3);
    // witness images are the true map values
    CHECK(evaluate(collapsed_net(), w.u) == w.fu);

    const auto fold = sampled_injectivity(folded_net(), 10'000, 7);
    REQUIRE(fold.collided);
    const Vector fu = evaluate(folded_net(), fold.witness->u);
    const Vector fv = evaluate(folded_net(), fold.witness->v);
    CHECK(norm2(difference(fu, fv)) <= 1e-9);
    CHECK(norm2(difference(fold.witness->u, fold.witness->v)) >= 1e-3);

    CHECK_THROWS_AS(sampled_injectivity(identity_net(), 0, 1), InvalidArgument);
}

TEST_CASE("sampled_injectivity is deterministic for a fixed seed", "[oracle]")
{
    const auto a = sampled_injectivity(folded_net(), 10'000, 99);
    const auto b = sampled_injectivity(folded_net(), 10'000, 99);
    REQUIRE(a.collided == b.collided);
    CHECK(a.trials == b.trials);
    if (a.collided) {
        CHECK(a.witness->u == b.witness->u);
        CHECK(a.witness->v == b.witness->v);
    }
}

TEST_CASE("sampled_injectivity on a grid map", "[oracle]")
{
    // identity split into two cells along axis 1
    PatchGrid grid({{0, 0.4, 1}, {0, 1}},
                   {bilinear({0, 0}, {0.4, 0}, {0, 1}, {0.4, 1}), bilinear({0.4, 0}, {1, 0}, {0.4, 1}, {1, 1})});
    CHECK_FALSE(sampled_injectivity(grid, 2000, 5).collided);
}

TEST_CASE("acute_2d examples", "[oracle]")
{
    CHECK(acute_2d(std::vector<Vector>{{1, 0}, {0, 1}}));
    CHECK_FALSE(acute_2d(std::vector<Vector>{{1, 0}, {-1, 0}}));
    // angles 0, 135, 270 degrees: largest gap 135 < 180
    CHECK_FALSE(acute_2d(std::vector<Vector>{{1, 0}, {-1, 1}, {0, -1}}));
    CHECK(acute_2d(std::vector<Vector>{{1, 0}}));
    CHECK_THROWS_AS(acute_2d(std::vector<Vector>{{0, 0}}), InvalidArgument);
    CHECK_THROWS_AS(acute_2d(std::vector<Vector>{{1, 0, 0}}), DimensionMismatch);
}

TEST_CASE("acute_2d agrees with the certificate LP", "[oracle][property]")
{
    const std::uint64_t seed = 2468;
    INFO("seed " << seed);
    CounterRng rng(seed);
    int acute = 0, not_acute = 0, banded = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Vector> units;
        const auto gens = vcert::testing::random_arc_generators(rng, units);
        const bool exact = acute_2d(gens);
        const double t = certificate_lp(units, 2).t_star;
        const bool lp = t > default_threshold;
        if (exact != lp) {
            // only allowed when the cone is within the threshold band of a half-plane
            INFO("trial " << trial << " t* = " << t);
            REQUIRE(std::abs(t) <= 2.0 * default_threshold);
            ++banded;
        }
        (exact ? acute : not_acute)++;
    }
    CHECK(acute > 50);
    CHECK(not_acute > 50);
    CHECK(banded == 0);
}

TEST_CASE("fd_jacobian examples", "[oracle]")
{
    const Matrix J = fd_jacobian(identity_net(), Vector{0.5, 0.5}, 1e-5);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) CHECK_THAT(J(r, c), WithinAbs(r == c ? 1.0 : 0.0, 1e-10));

    // quad partials at (s, t): dF/dxi1 = (1 + t, t), dF/dxi2 = (s, 1 + s)
    const ControlNet quad = bilinear({0, 0}, {1, 0}, {0, 1}, {2, 2});
    const Matrix Q = fd_jacobian(quad, Vector{1e-3, 1e-3}, 1e-4);
    CHECK_THAT(Q(0, 0), WithinAbs(1.0, 1e-2));
    CHECK_THAT(Q(1, 0), WithinAbs(0.0, 1e-2));
    CHECK_THAT(Q(0, 1), WithinAbs(0.0, 1e-2));
    CHECK_THAT(Q(1, 1), WithinAbs(1.0, 1e-2));
    CHECK_THAT(Q(0, 0), WithinAbs(1.001, 1e-9));

    const ControlNet sq({2}, {{0.0}, {0.0}, {1.0}});
    CHECK_THAT(fd_jacobian(sq, Vector{0.5}, 1e-5)(0, 0), WithinAbs(1.0, 1e-9));

    CHECK_THROWS_AS(fd_jacobian(sq, Vector{1e-6}, 1e-5), DomainError);
    CHECK_THROWS_AS(fd_jacobian(sq, Vector{0.5}, 0.0), InvalidArgument);
}

TEST_CASE("fd_jacobian on grids matches the evaluator Jacobian", "[oracle][property]")
{
    CounterRng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ControlNet> patches;
        for (int c = 0; c < 4; ++c) patches.push_back(vcert::testing::random_net(rng, 2, 3));
        PatchGrid grid({{0, 0.3, 1}, {0, 0.6, 1}}, std::move(patches));
        MapEvaluator map(grid);
        Matrix J;
        for (int k = 0; k < 50; ++k) {
            // keep away from cell faces so the central difference stays in one cell
            Vector x{rng.uniform(0.01, 0.29), rng.uniform(0.61, 0.99)};
            const Matrix fd = fd_jacobian(grid, x, 1e-6);
            map.jacobian(x, J);
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t c = 0; c < 2; ++c) REQUIRE_THAT(fd(r, c), WithinAbs(J(r, c), 1e-6));
        }
    }
}

TEST_CASE("hull_membership examples", "[oracle]")
{
    const std::vector<Vector> square{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    CHECK(hull_membership(Vector{0.5, 0.5}, square));
    CHECK_FALSE(hull_membership(Vector{2, 2}, square));
    CHECK(hull_membership(Vector{1, 1}, square));
    CHECK_FALSE(hull_membership(Vector{1.0 + 1e-6, 1}, square));

    const std::vector<Vector> quad{{0, 0}, {1, 0}, {0, 1}, {2, 2}};
    CHECK(hull_membership(Vector{0.75, 0.75}, quad));

    CHECK_THROWS_AS(hull_membership(Vector{0.5, 0.5}, std::vector<Vector>{{1, 0, 0}}), DimensionMismatch);
    CHECK_THROWS_AS(hull_membership(Vector{0.5}, std::vector<Vector>{}), InvalidArgument);
}

TEST_CASE("certifier is sufficient, not necessary", "[oracle]")
{
    // Two rotations 120 degrees apart: each alone is injective, but their
    // columns together span more than a half-plane under (+,+).
    const double c = std::cos(2.0 * std::numbers::pi / 3.0), s = std::sin(2.0 * std::numbers::pi / 3.0);
    const std::vector<GeneratorSet> family{{0, {{1, 0}, {c, s}}}, {1, {{0, 1}, {-s, c}}}};
    CHECK(certify_matrix_family(family).verdict == Verdict::NotCertified);
    CHECK_FALSE(sampled_injectivity(vcert::testing::linear_map(1, 0, 0, 1), 10'000, 21).collided);
    CHECK_FALSE(sampled_injectivity(vcert::testing::linear_map(c, -s, s, c), 10'000, 22).collided);
}

TEST_CASE("counter rng streams are reproducible", "[oracle]")
{
    CounterRng a(5), b(5);
    for (int k = 0; k < 100; ++k) REQUIRE(a.next() == b.next());
    CounterRng x = CounterRng(5).split(3), y = CounterRng(5).split(3), z = CounterRng(5).split(4);
    const auto vx = x.next();
    CHECK(vx == y.next());
    CHECK(vx != z.next());
    for (int k = 0; k < 1000; ++k) {
        const double u = a.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}
