#include "conefact/partition.hpp"
#include "conefact/util.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>
#include <stdexcept>

using namespace conefact;

namespace {

std::set<std::uint64_t> masks_of(const std::vector<SubsetWitness>& subsets) {
    std::set<std::uint64_t> out;
    for (const auto& s : subsets)
        out.insert(s.mask);
    return out;
}

std::vector<std::uint64_t> canonical(const PolyPartition& p) {
    std::vector<std::uint64_t> key;
    for (const auto& part : p.parts) {
        std::uint64_t m = 0;
        for (int i : part)
            m |= 1ULL << i;
        key.push_back(m);
    }
    std::sort(key.begin(), key.end());
    return key;
}

std::set<std::vector<std::uint64_t>> drain_partitions(PartitionStream& stream) {
    std::set<std::vector<std::uint64_t>> out;
    while (auto p = stream.next())
        out.insert(canonical(*p));
    return out;
}

} // namespace

TEST_SUITE("partition") {

TEST_CASE("halfspace subsets of three collinear reals") {
    std::vector<std::vector<double>> x = {{1.0}, {2.0}, {3.0}};
    auto subs = halfspace_subsets(x);
    std::set<std::uint64_t> expected = {0b000, 0b001, 0b011, 0b111, 0b100, 0b110};
    CHECK(masks_of(subs) == expected);
    CHECK(masks_of(subs) == oracle::halfspace_masks(x));
}

TEST_CASE("halfspace subsets of a triangle give all eight") {
    std::vector<std::vector<double>> x = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    auto subs = halfspace_subsets(x);
    CHECK(subs.size() == 8);
    CHECK(masks_of(subs) == oracle::halfspace_masks(x));
}

TEST_CASE("empty and full sets are always present") {
    auto rng = make_rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        int m = 2 + static_cast<int>(rng() % 4);
        int d = 1 + static_cast<int>(rng() % 2);
        std::vector<std::vector<double>> x(m, std::vector<double>(d));
        for (auto& p : x)
            for (double& v : p)
                v = u(rng);
        auto masks = masks_of(halfspace_subsets(x));
        CHECK(masks.count(0));
        CHECK(masks.count((1ULL << m) - 1));
    }
}

TEST_CASE("subset witnesses actually realize their subsets") {
    auto rng = make_rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        int m = 2 + static_cast<int>(rng() % 3);
        std::vector<std::vector<double>> x(m, std::vector<double>(2));
        for (auto& p : x)
            for (double& v : p)
                v = u(rng);
        for (const auto& s : halfspace_subsets(x)) {
            REQUIRE(s.halfspaces.size() == 1);
            const auto& h = s.halfspaces[0];
            for (int i = 0; i < m; ++i) {
                double val = h.a[0] * x[i][0] + h.a[1] * x[i][1];
                bool inside = val >= h.b - 1e-9;
                CHECK(inside == ((s.mask >> i) & 1));
            }
        }
    }
}

TEST_CASE("duplicate points travel together") {
    std::vector<std::vector<double>> x = {{0.5}, {0.5}, {2.0}};
    auto subs = halfspace_subsets(x);
    for (const auto& s : subs) {
        bool first = s.mask & 1;
        bool second = s.mask & 2;
        CHECK(first == second);
    }
    std::set<std::uint64_t> expected = {0b000, 0b011, 0b100, 0b111};
    CHECK(masks_of(subs) == expected);
}

TEST_CASE("polyhedron subsets add the middle point at k2=2") {
    std::vector<std::vector<double>> x = {{1.0}, {2.0}, {3.0}};
    PolyhedronSubsetStream stream(x, 2);
    auto subs = stream.drain();
    std::set<std::uint64_t> expected = {0b000, 0b001, 0b011, 0b111, 0b100, 0b110, 0b010};
    CHECK(masks_of(subs) == expected);
    CHECK(subs.size() == 7);
    CHECK(masks_of(subs) == oracle::polyhedron_masks(x, 2));

    // witnesses stay within k2 halfspaces and realize the subset
    for (const auto& s : subs) {
        CHECK(s.halfspaces.size() <= 2);
        for (int i = 0; i < 3; ++i) {
            bool inside = true;
            for (const auto& h : s.halfspaces)
                inside = inside && (h.a[0] * x[i][0] >= h.b - 1e-9);
            CHECK(inside == ((s.mask >> i) & 1));
        }
    }
}

TEST_CASE("polyhedron subsets at k2=1 equal halfspace subsets") {
    auto rng = make_rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        int m = 2 + static_cast<int>(rng() % 4);
        std::vector<std::vector<double>> x(m, std::vector<double>(2));
        for (auto& p : x)
            for (double& v : p)
                v = u(rng);
        PolyhedronSubsetStream stream(x, 1);
        CHECK(masks_of(stream.drain()) == masks_of(halfspace_subsets(x)));
    }
}

TEST_CASE("polyhedron subset count bound") {
    auto rng = make_rng(44);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        int m = 3 + static_cast<int>(rng() % 3);
        std::vector<std::vector<double>> x(m, std::vector<double>(2));
        for (auto& p : x)
            for (double& v : p)
                v = u(rng);
        std::size_t base = halfspace_subsets(x).size();
        PolyhedronSubsetStream stream(x, 2);
        CHECK(stream.drain().size() <= base * base);
    }
}

TEST_CASE("trivial partition for k1=1") {
    std::vector<std::vector<double>> x = {{1.0}, {2.0}, {3.0}};
    PartitionStream stream(x, 1, 1);
    auto first = stream.next();
    REQUIRE(first.has_value());
    CHECK(first->parts.size() == 1);
    CHECK(first->parts[0] == std::vector<int>{0, 1, 2});
    CHECK_FALSE(stream.next().has_value());
}

TEST_CASE("k1=2 partitions match the brute-force pair oracle") {
    std::vector<std::vector<double>> x = {{1.0}, {2.0}, {3.0}};
    PartitionStream stream(x, 2, 1);
    CHECK(drain_partitions(stream) == oracle::partitions(x, 2, 1));
}

TEST_CASE("random small instances match the oracle") {
    auto rng = make_rng(45);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 12; ++t) {
        int m = 2 + static_cast<int>(rng() % 4); // up to 5 points
        int d = 1 + static_cast<int>(rng() % 2);
        int k1 = 1 + static_cast<int>(rng() % 2);
        int k2 = 1 + static_cast<int>(rng() % 2);
        std::vector<std::vector<double>> x(m, std::vector<double>(d));
        for (auto& p : x)
            for (double& v : p)
                v = u(rng);
        PartitionStream stream(x, k1, k2);
        CHECK(drain_partitions(stream) == oracle::partitions(x, k1, k2));
    }
}

TEST_CASE("collinear points in the plane") {
    std::vector<std::vector<double>> x = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
    auto subs = halfspace_subsets(x);
    CHECK(masks_of(subs) == oracle::halfspace_masks(x));
    PartitionStream stream(x, 2, 1);
    CHECK(drain_partitions(stream) == oracle::partitions(x, 2, 1));
}

TEST_CASE("emitted partitions are genuine partitions") {
    auto rng = make_rng(46);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> x(5, std::vector<double>(2));
    for (auto& p : x)
        for (double& v : p)
            v = u(rng);
    PartitionStream stream(x, 2, 2);
    int count = 0;
    while (auto p = stream.next()) {
        ++count;
        std::uint64_t seen = 0;
        for (const auto& part : p->parts) {
            CHECK_FALSE(part.empty());
            for (int i : part) {
                bool repeated = (seen & (1ULL << i)) != 0;
                CHECK_FALSE(repeated);
                seen |= 1ULL << i;
            }
        }
        CHECK(seen == 0b11111);
        CHECK(p->parts.size() == p->inducing_polyhedra.size());
        // membership in the inducing polyhedron for the first part
        for (int i : p->parts[0])
            CHECK(p->inducing_polyhedra[0].contains(x[i], 1e-9));
    }
    CHECK(count >= 1);
}

TEST_CASE("streams are deterministic") {
    auto rng = make_rng(47);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> x(4, std::vector<double>(2));
    for (auto& p : x)
        for (double& v : p)
            v = u(rng);
    PartitionStream a(x, 2, 2), b(x, 2, 2);
    while (true) {
        auto pa = a.next();
        auto pb = b.next();
        CHECK(pa.has_value() == pb.has_value());
        if (!pa)
            break;
        CHECK(pa->parts == pb->parts);
    }
}

} // TEST_SUITE
