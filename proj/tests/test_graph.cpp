#include <doctest.h>

#include <random>

#include "mdrsp/graph.hpp"

using namespace mdrsp;

TEST_CASE("connected components") {
    SUBCASE("one edge, one isolated vertex") {
        CapGraph g(3);
        g.add_edge(0, 1, 1.0);
        auto cc = g.connected_components();
        REQUIRE(cc.size() == 2);
        CHECK(cc[0] == std::vector<int>{0, 1});
        CHECK(cc[1] == std::vector<int>{2});
    }
    SUBCASE("empty edge set gives singletons") {
        CapGraph g(4);
        CHECK(g.connected_components().size() == 4);
    }
    SUBCASE("triangle plus pair") {
        CapGraph g(5);
        g.add_edge(0, 1, 1);
        g.add_edge(1, 2, 1);
        g.add_edge(2, 0, 1);
        g.add_edge(3, 4, 0.5);
        CHECK(g.connected_components().size() == 2);
    }
    SUBCASE("zero-capacity edges are ignored") {
        CapGraph g(2);
        g.add_edge(0, 1, 0.0);
        CHECK(g.connected_components().size() == 2);
    }
}

TEST_CASE("min s-t cut basics") {
    SUBCASE("single edge") {
        CapGraph g(2);
        g.add_edge(0, 1, 3.0);
        auto [val, side] = g.min_st_cut(0, 1);
        CHECK(val == doctest::Approx(3.0));
        CHECK(side == std::vector<int>{0});
    }
    SUBCASE("path takes the bottleneck") {
        CapGraph g(3);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 2, 2.0);
        auto [val, side] = g.min_st_cut(0, 2);
        CHECK(val == doctest::Approx(1.0));
        CHECK(side == std::vector<int>{0});
    }
    SUBCASE("triangle: both cuts enumerated by hand") {
        // cuts: {s} -> 1+1 = 2, {s,a} -> 2+1 = 3
        CapGraph g(3);
        g.add_edge(0, 1, 1.0);  // s-a
        g.add_edge(1, 2, 2.0);  // a-t
        g.add_edge(0, 2, 1.0);  // s-t
        auto [val, side] = g.min_st_cut(0, 2);
        CHECK(val == doctest::Approx(2.0));
        CHECK(side == std::vector<int>{0});
    }
    SUBCASE("disconnected pair has a zero cut") {
        CapGraph g(4);
        g.add_edge(0, 1, 5.0);
        g.add_edge(2, 3, 5.0);
        auto [val, side] = g.min_st_cut(0, 3);
        CHECK(val == doctest::Approx(0.0));
        CHECK(side == std::vector<int>{0, 1});
    }
    SUBCASE("parallel edges merge") {
        CapGraph g(2);
        g.add_edge(0, 1, 1.0);
        g.add_edge(0, 1, 2.5);
        auto [val, side] = g.min_st_cut(0, 1);
        CHECK(val == doctest::Approx(3.5));
    }
}

namespace {

// brute force over all 2^(n-2) s-t partitions
double brute_force_cut(const CapGraph& g, int s, int t) {
    const int n = g.num_vertices();
    std::vector<int> rest;
    for (int v = 0; v < n; ++v)
        if (v != s && v != t) rest.push_back(v);
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << rest.size()); ++mask) {
        std::vector<char> in_s(n, 0);
        in_s[s] = 1;
        for (std::size_t k = 0; k < rest.size(); ++k)
            if (mask & (1u << k)) in_s[rest[k]] = 1;
        double cut = 0.0;
        for (int v = 0; v < n; ++v)
            for (auto [w, c] : g.adjacency()[v])
                if (v < w && in_s[v] != in_s[w]) cut += c;
        best = std::min(best, cut);
    }
    return best;
}

}  // namespace

TEST_CASE("min cut equals brute force on random graphs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 9);  // up to 12 vertices
        CapGraph g(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng() % 100 < 45)
                    g.add_edge(i, j, (rng() % 1000) / 100.0);
        const int s = 0, t = n - 1;
        auto [val, side] = g.min_st_cut(s, t);
        CHECK(val == doctest::Approx(brute_force_cut(g, s, t)).epsilon(1e-9));
        // duality: returned value equals capacity across the returned partition
        std::vector<char> in_s(n, 0);
        for (int v : side) in_s[v] = 1;
        CHECK(in_s[s]);
        CHECK(!in_s[t]);
        double cap = 0.0;
        for (int v = 0; v < n; ++v)
            for (auto [w, c] : g.adjacency()[v])
                if (v < w && in_s[v] != in_s[w]) cap += c;
        CHECK(cap == doctest::Approx(val).epsilon(1e-9));
    }
}
