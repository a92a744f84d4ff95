#include "conefact/symmat.hpp"
#include "conefact/util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>

using namespace conefact;

namespace {

SymMat random_sym(int r, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    SymMat m(r);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j)
            m.set(i, j, normal(rng));
    return m;
}

// Entrywise double loop over the full matrices, independent of inner().
double inner_oracle(const SymMat& a, const SymMat& b) {
    double s = 0.0;
    for (int i = 0; i < a.side(); ++i)
        for (int j = 0; j < a.side(); ++j)
            s += a(i, j) * b(i, j);
    return s;
}

// Spectral norm via power iteration on A^2 (PSD, so the iteration is safe
// even when the extreme eigenvalues come in +/- pairs).
double spectral_oracle(const SymMat& a, std::mt19937_64& rng) {
    int r = a.side();
    std::vector<std::vector<double>> a2(r, std::vector<double>(r, 0.0));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            double s = 0.0;
            for (int k = 0; k < r; ++k)
                s += a(i, k) * a(k, j);
            a2[i][j] = s;
        }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(r);
    for (double& v : x)
        v = normal(rng);
    double lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> y(r, 0.0);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                y[i] += a2[i][j] * x[j];
        double n = 0.0;
        for (double v : y)
            n += v * v;
        n = std::sqrt(n);
        if (n == 0.0)
            return 0.0;
        for (int i = 0; i < r; ++i)
            x[i] = y[i] / n;
        lam = n;
    }
    return std::sqrt(lam);
}

} // namespace

TEST_SUITE("symmat") {

TEST_CASE("inner products") {
    SymMat i2 = SymMat::identity(2);
    CHECK(inner(i2, i2) == doctest::Approx(2.0));

    SymMat d10(2), d01(2);
    d10.set(0, 0, 1.0);
    d01.set(1, 1, 1.0);
    CHECK(inner(d10, d01) == doctest::Approx(0.0));

    auto rng = make_rng(11);
    for (int t = 0; t < 50; ++t) {
        SymMat a = random_sym(3, rng);
        SymMat b = random_sym(3, rng);
        CHECK(inner(a, b) == doctest::Approx(inner_oracle(a, b)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(inner(SymMat(2), SymMat(3)), std::invalid_argument);
}

TEST_CASE("norms on pinned matrices") {
    SymMat d(2);
    d.set(0, 0, -1.0);
    d.set(1, 1, 2.0);
    MatNorms n = norms(d);
    CHECK(n.inf == doctest::Approx(2.0));
    CHECK(n.frob == doctest::Approx(std::sqrt(5.0)));
    CHECK(n.spectral == doctest::Approx(2.0));

    SymMat offdiag(2);
    offdiag.set(0, 1, 1.0);
    MatNorms n2 = norms(offdiag);
    CHECK(n2.inf == doctest::Approx(1.0));
    CHECK(n2.frob == doctest::Approx(std::sqrt(2.0)));
    CHECK(n2.spectral == doctest::Approx(1.0));
}

TEST_CASE("spectral norm matches power iteration") {
    auto rng = make_rng(12);
    for (int t = 0; t < 20; ++t) {
        SymMat a = random_sym(4, rng);
        double ref = spectral_oracle(a, rng);
        CHECK(norms(a).spectral == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("eig on pinned matrices") {
    SymMat d(2);
    d.set(0, 0, 3.0);
    d.set(1, 1, 1.0);
    auto dec = eig(d);
    CHECK(dec.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(dec.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(std::abs(dec.vectors[0][0]) == doctest::Approx(1.0));
    CHECK(std::abs(dec.vectors[1][1]) == doctest::Approx(1.0));

    SymMat x(2);
    x.set(0, 1, 1.0);
    auto dx = eig(x);
    CHECK(dx.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(dx.eigenvalues[1] == doctest::Approx(-1.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(dx.vectors[0][0] * dx.vectors[0][1]) == doctest::Approx(s * s));
    CHECK(dx.vectors[0][0] * dx.vectors[0][1] > 0.0); // (1,1)/sqrt(2) up to sign
    CHECK(dx.vectors[1][0] * dx.vectors[1][1] < 0.0); // (1,-1)/sqrt(2) up to sign
}

TEST_CASE("eig reconstruction and orthonormality, r <= 4") {
    auto rng = make_rng(13);
    for (int r = 1; r <= 4; ++r) {
        for (int t = 0; t < 100; ++t) {
            SymMat a = random_sym(r, rng, 2.0);
            auto dec = eig(a);
            SymMat rec = reconstruct(dec);
            SymMat diff = rec - a;
            CHECK(std::sqrt(inner(diff, diff)) <= 1e-10 * std::max(1.0, norms(a).frob));
            for (int i = 0; i < r; ++i) {
                for (int j = 0; j < r; ++j) {
                    double dot = 0.0;
                    for (int k = 0; k < r; ++k)
                        dot += dec.vectors[i][k] * dec.vectors[j][k];
                    CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-10);
                }
            }
            for (int k = 0; k + 1 < r; ++k)
                CHECK(dec.eigenvalues[k] >= dec.eigenvalues[k + 1]);
        }
    }
}

TEST_CASE("svec ordering and isometry") {
    SymMat i2 = SymMat::identity(2);
    auto v = svec(i2);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(1.0));
    CHECK(v[2] == doctest::Approx(0.0));

    auto rng = make_rng(14);
    for (int r = 1; r <= 4; ++r) {
        for (int t = 0; t < 50; ++t) {
            SymMat a = random_sym(r, rng);
            SymMat b = random_sym(r, rng);
            SymMat back = smat(svec(a));
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    CHECK(back(i, j) == doctest::Approx(a(i, j)).epsilon(1e-14));
            double dot = 0.0;
            auto va = svec(a), vb = svec(b);
            for (std::size_t k = 0; k < va.size(); ++k)
                dot += va[k] * vb[k];
            CHECK(std::abs(dot - inner(a, b)) <= 1e-12 * std::max(1.0, std::abs(dot)));
        }
    }

    CHECK_THROWS_AS(smat(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("entrywise max never exceeds the spectral norm") {
    auto rng = make_rng(15);
    for (int t = 0; t < 10000; ++t) {
        int r = 1 + static_cast<int>(rng() % 4);
        SymMat a = random_sym(r, rng, 1.5);
        MatNorms n = norms(a);
        CHECK(n.inf <= n.spectral + 1e-12);
    }
}

} // TEST_SUITE
