#include "conefact/bilinear.hpp"
#include "conefact/util.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace conefact;

namespace {

// A full-anchor system: every row and column is its own anchor.
BilinearSystem full_anchor_system(const std::vector<std::vector<double>>& target, int d,
                                  HPolyhedron p) {
    BilinearSystem sys;
    sys.dim = d;
    sys.num_row_anchors = static_cast<int>(target.size());
    sys.num_col_anchors = static_cast<int>(target[0].size());
    sys.row_expansion.resize(target.size());
    sys.col_expansion.resize(target[0].size());
    for (int i = 0; i < sys.num_row_anchors; ++i)
        sys.row_expansion[i] = {{i, 1.0}};
    for (int j = 0; j < sys.num_col_anchors; ++j)
        sys.col_expansion[j] = {{j, 1.0}};
    sys.target = target;
    sys.membership = std::move(p);
    return sys;
}

} // namespace

TEST_SUITE("bilinear") {

TEST_CASE("xy = 4 inside a box is feasible") {
    HPolyhedron box = HPolyhedron::box({0.0}, {4.0});
    BilinearSystem sys = full_anchor_system({{4.0}}, 1, box);
    SolveBudget budget;
    budget.tol_feas = 1e-8;
    budget.seed = 3;
    FeasibilityResult r = solve(sys, budget);
    REQUIRE(r.status == FeasStatus::Feasible);
    CHECK(r.residual < 1e-8);
    CHECK(r.constraint_violation <= 1e-8);
    double x = r.row_anchors[0][0];
    double y = r.col_anchors[0][0];
    CHECK(x * y == doctest::Approx(4.0).epsilon(1e-7));
    CHECK(x >= -1e-9);
    CHECK(x <= 4.0 + 1e-9);
}

TEST_CASE("xy = -1 with x,y >= 0 stays unknown") {
    HPolyhedron orthant(1);
    orthant.add({{1.0}, 0.0});
    BilinearSystem sys = full_anchor_system({{-1.0}}, 1, orthant);
    SolveBudget budget;
    budget.seed = 3;
    budget.starts = 16;
    FeasibilityResult r = solve(sys, budget);
    CHECK(r.status == FeasStatus::Unknown);
    // no solution exists: equations and membership cannot both be met
    CHECK(std::max(r.residual, r.constraint_violation) >= 0.1);
}

TEST_CASE("planted systems are recovered and certified") {
    auto rng = make_rng(51);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    int feasible = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        int d = 1 + static_cast<int>(rng() % 3);
        int n = 2 + static_cast<int>(rng() % 3);
        int m = 2 + static_cast<int>(rng() % 3);
        HPolyhedron box = HPolyhedron::box(std::vector<double>(d, 0.0),
                                           std::vector<double>(d, 2.0));
        std::vector<std::vector<double>> urows(n, std::vector<double>(d));
        std::vector<std::vector<double>> vcols(m, std::vector<double>(d));
        for (auto& row : urows)
            for (double& v : row)
                v = u(rng);
        for (auto& col : vcols)
            for (double& v : col)
                v = u(rng);
        std::vector<std::vector<double>> target(n, std::vector<double>(m, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < d; ++k)
                    target[i][j] += urows[i][k] * vcols[j][k];

        BilinearSystem sys = full_anchor_system(target, d, box);
        SolveBudget budget;
        budget.seed = 1000 + t;
        budget.starts = 64;
        FeasibilityResult r = solve(sys, budget);
        if (r.status != FeasStatus::Feasible)
            continue;
        ++feasible;
        // soundness: independent evaluation agrees
        auto [eq, mem] = evaluate_assignment(sys, r.row_anchors, r.col_anchors);
        double scale = 0.0;
        for (const auto& row : target)
            for (double v : row)
                scale = std::max(scale, std::abs(v));
        CHECK(eq <= 1e-6 * scale + 1e-12);
        CHECK(mem <= 1e-8);
    }
    CHECK(feasible >= 45); // >= 90%
}

TEST_CASE("deterministic under a fixed seed and thread count") {
    HPolyhedron box = HPolyhedron::box({0.0, 0.0}, {2.0, 2.0});
    std::vector<std::vector<double>> target = {{1.0, 0.5}, {0.5, 1.0}};
    BilinearSystem sys = full_anchor_system(target, 2, box);
    SolveBudget budget;
    budget.seed = 9;

    FeasibilityResult a = solve(sys, budget);
    FeasibilityResult b = solve(sys, budget);
    budget.threads = 4;
    FeasibilityResult c = solve(sys, budget);

    REQUIRE(a.status == FeasStatus::Feasible);
    CHECK(a.winning_start == b.winning_start);
    CHECK(a.winning_start == c.winning_start);
    CHECK(a.row_anchors == b.row_anchors);
    CHECK(a.row_anchors == c.row_anchors);
    CHECK(a.col_anchors == c.col_anchors);
}

TEST_CASE("malformed systems are rejected") {
    HPolyhedron box = HPolyhedron::box({0.0}, {1.0});
    BilinearSystem sys = full_anchor_system({{1.0}}, 1, box);
    sys.col_expansion[0] = {{0, 0.5}}; // coefficients no longer sum to 1
    CHECK_THROWS_AS(solve(sys, SolveBudget{}), std::invalid_argument);
}

} // TEST_SUITE
