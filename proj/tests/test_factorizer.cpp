#include "conefact/factorizer.hpp"
#include "conefact/util.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

using namespace conefact;

namespace {

double product_entry(const FactorPair& f, int i, int j) {
    double s = 0.0;
    for (std::size_t k = 0; k < f.u_rows[i].size(); ++k)
        s += f.u_rows[i][k] * f.v_cols[j][k];
    return s;
}

// affine dimension via SVD of the difference matrix, independent of the
// greedy basis construction
int affine_dim_oracle(const std::vector<std::vector<double>>& pts, double tol) {
    Eigen::MatrixXd diffs(pts[0].size(), pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i)
        for (std::size_t k = 0; k < pts[0].size(); ++k)
            diffs(k, i - 1) = pts[i][k] - pts[0][k];
    if (diffs.cols() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs);
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > tol * std::max(1.0, svd.singularValues()(0)))
            ++rank;
    return rank;
}

} // namespace

TEST_SUITE("factorizer") {

TEST_CASE("affine_basis pinned cases") {
    AffineBasis collinear = affine_basis({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
    CHECK(collinear.basis_indices == std::vector<int>{0, 1});
    CHECK(collinear.dim == 1);

    AffineBasis triangle = affine_basis({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    CHECK(triangle.basis_indices == std::vector<int>{0, 1, 2});
    CHECK(triangle.dim == 2);
}

TEST_CASE("affine_basis tolerates sub-tolerance noise") {
    auto rng = make_rng(61);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> tiny(0.0, 1e-10);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> dir = {u(rng), u(rng), u(rng)};
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < 5; ++i) {
            double s = u(rng);
            pts.push_back({s * dir[0] + tiny(rng), s * dir[1] + tiny(rng),
                           s * dir[2] + tiny(rng)});
        }
        AffineBasis b = affine_basis(pts, 1e-8);
        CHECK(b.dim == affine_dim_oracle(pts, 1e-8));
        CHECK(b.dim <= 1);
    }
}

TEST_CASE("affine_coeffs pinned and planted") {
    auto lam = affine_coeffs({{0.0, 0.0}, {1.0, 0.0}}, {2.0, 0.0});
    REQUIRE(lam.size() == 2);
    CHECK(lam[0] == doctest::Approx(-1.0));
    CHECK(lam[1] == doctest::Approx(2.0));

    auto indicator = affine_coeffs({{0.0, 0.0}, {1.0, 0.0}}, {1.0, 0.0});
    CHECK(indicator[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(indicator[1] == doctest::Approx(1.0));

    auto rng = make_rng(62);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 30; ++t) {
        std::vector<std::vector<double>> basis = {
            {u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}};
        std::vector<double> planted = {u(rng), u(rng)};
        planted.push_back(1.0 - planted[0] - planted[1]);
        std::vector<double> target(3, 0.0);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                target[i] += planted[k] * basis[k][i];
        auto got = affine_coeffs(basis, target);
        double sum = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(planted[i]).epsilon(1e-9));
            sum += got[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(affine_coeffs({{0.0, 0.0}, {1.0, 0.0}}, {0.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("normalize_to_minimal_faces pinned descent") {
    HPolyhedron box = HPolyhedron::box({0.0, 0.0}, {1.0, 1.0});
    std::vector<std::vector<double>> u = {{1.0, 0.0}};
    std::vector<std::vector<double>> v = {{0.5, 0.5}};
    auto [ub, vb] = normalize_to_minimal_faces(u, v, box);
    CHECK(vb[0][0] == doctest::Approx(0.5));
    CHECK(vb[0][1] == doctest::Approx(0.0).epsilon(1e-12)); // negative direction first
    // product preserved
    CHECK(ub[0][0] * vb[0][0] + ub[0][1] * vb[0][1] ==
          doctest::Approx(u[0][0] * v[0][0] + u[0][1] * v[0][1]));
}

TEST_CASE("normalize_to_minimal_faces is a no-op for trivial kernels") {
    HPolyhedron box = HPolyhedron::box({0.0, 0.0}, {1.0, 1.0});
    std::vector<std::vector<double>> u = {{1.0, 0.0}, {0.0, 1.0}};
    std::vector<std::vector<double>> v = {{0.25, 0.75}, {0.5, 0.5}};
    auto [ub, vb] = normalize_to_minimal_faces(u, v, box);
    CHECK(ub == u);
    CHECK(vb == v);
}

TEST_CASE("normalize_to_minimal_faces preserves the product and reaches minimality") {
    auto rng = make_rng(63);
    std::uniform_real_distribution<double> u01(0.1, 0.9);
    for (int t = 0; t < 20; ++t) {
        const int d = 3;
        const int n = 2; // rank-deficient U so the kernel is nontrivial
        const int m = 3;
        HPolyhedron box = HPolyhedron::box(std::vector<double>(d, 0.0),
                                           std::vector<double>(d, 1.0));
        std::vector<std::vector<double>> urows(n, std::vector<double>(d));
        std::vector<std::vector<double>> vcols(m, std::vector<double>(d));
        for (auto& row : urows)
            for (double& x : row)
                x = u01(rng);
        for (auto& col : vcols)
            for (double& x : col)
                x = u01(rng);

        std::vector<std::vector<double>> product(n, std::vector<double>(m, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < d; ++k)
                    product[i][j] += urows[i][k] * vcols[j][k];

        auto [ub, vb] = normalize_to_minimal_faces(urows, vcols, box);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k)
                    s += ub[i][k] * vb[j][k];
                CHECK(s == doctest::Approx(product[i][j]).epsilon(1e-10));
            }
        for (const auto& col : vb)
            CHECK(box.contains(col, 1e-9));

        // minimality: no kernel direction of U stays inside the tight
        // normals' null space
        Eigen::MatrixXd umat(n, d);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k)
                umat(i, k) = ub[i][k];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(umat, Eigen::ComputeFullV);
        int rank = 0;
        for (int k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()(k) > 1e-8)
                ++rank;
        Eigen::MatrixXd kern = svd.matrixV().rightCols(d - rank);
        if (kern.cols() == 0)
            continue;
        for (const auto& col : vb) {
            Face face = minimal_face(box, col);
            Eigen::MatrixXd tight(face.tight_set.size(), d);
            for (std::size_t ti = 0; ti < face.tight_set.size(); ++ti)
                for (int k = 0; k < d; ++k)
                    tight(ti, k) = box.halfspaces()[face.tight_set[ti]].a[k];
            Eigen::MatrixXd restricted = tight * kern;
            Eigen::JacobiSVD<Eigen::MatrixXd> rsvd(restricted);
            int rrank = 0;
            for (int k = 0; k < rsvd.singularValues().size(); ++k)
                if (rsvd.singularValues()(k) > 1e-8)
                    ++rrank;
            CHECK(rrank == kern.cols()); // trivial intersection with ker(U)
        }
    }
}

TEST_CASE("factor_in_polyhedron recovers a rank-1 matrix") {
    FactorInstance inst;
    inst.m = {{1.0, 2.0}, {2.0, 4.0}};
    inst.d = 1;
    inst.p = HPolyhedron::box({0.0}, {3.0});
    inst.budget.oracle.seed = 5;
    auto result = factor_in_polyhedron(inst);
    REQUIRE(result.has_value());
    CHECK(result->residual < 1e-6);
    CHECK(result->membership_violation <= 1e-8);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(product_entry(*result, i, j) == doctest::Approx(inst.m[i][j]).epsilon(1e-6));
}

TEST_CASE("factor_in_polyhedron reports NOT_FOUND on a rank obstruction") {
    FactorInstance inst;
    inst.m = {{1.0, 0.0}, {0.0, 1.0}};
    inst.d = 1;
    inst.p = HPolyhedron::box({0.0}, {2.0});
    inst.budget.oracle.seed = 5;
    CHECK_FALSE(factor_in_polyhedron(inst).has_value());
}

TEST_CASE("factor_in_polyhedron factors the triangle matrix at d=3") {
    FactorInstance inst;
    inst.m = {{0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}};
    inst.d = 3;
    inst.p = HPolyhedron::box({0.0, 0.0, 0.0}, {2.0, 2.0, 2.0});
    inst.budget.oracle.seed = 5;
    auto result = factor_in_polyhedron(inst);
    REQUIRE(result.has_value());
    CHECK(result->residual <= 1e-6);
    CHECK(result->membership_violation <= 1e-8);
}

TEST_CASE("planted factors on boundary faces are still found") {
    auto rng = make_rng(64);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    int found = 0;
    for (int t = 0; t < 5; ++t) {
        const int d = 2, n = 3, m = 3;
        std::vector<std::vector<double>> urows(n, std::vector<double>(d));
        std::vector<std::vector<double>> vcols(m, std::vector<double>(d));
        for (auto& row : urows)
            for (double& x : row)
                x = u(rng);
        for (int j = 0; j < m; ++j) {
            vcols[j][0] = u(rng);
            vcols[j][1] = (j == 0) ? 0.0 : u(rng); // first column pinned to a face
        }
        FactorInstance inst;
        inst.m.assign(n, std::vector<double>(m, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < d; ++k)
                    inst.m[i][j] += urows[i][k] * vcols[j][k];
        inst.d = d;
        inst.p = HPolyhedron::box({0.0, 0.0}, {1.0, 1.0});
        inst.budget.oracle.seed = 100 + t;
        auto result = factor_in_polyhedron(inst);
        if (result && result->residual < 1e-6)
            ++found;
    }
    CHECK(found >= 4);
}

TEST_CASE("instances must be nonnegative and bounded") {
    FactorInstance neg;
    neg.m = {{-1.0}};
    neg.d = 1;
    neg.p = HPolyhedron::box({0.0}, {1.0});
    CHECK_THROWS_AS(factor_in_polyhedron(neg), std::invalid_argument);

    FactorInstance unbounded;
    unbounded.m = {{1.0}};
    unbounded.d = 1;
    unbounded.p = HPolyhedron(1);
    unbounded.p.add({{1.0}, 0.0});
    CHECK_THROWS_AS(factor_in_polyhedron(unbounded), std::invalid_argument);
}

} // TEST_SUITE
