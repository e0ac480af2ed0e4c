#include <doctest.h>

#include <cmath>

#include "mdrsp/instance.hpp"
#include "test_util.hpp"

using namespace mdrsp;
using namespace mdrsp::testing;

TEST_CASE("tsplib EUC_2D coordinates give real-valued distances") {
    const std::string text =
        "NAME: tiny\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\n"
        "NODE_COORD_SECTION\n1 0 0\n2 3 4\nEOF\n";
    auto cm = parse_tsplib(text);
    CHECK(cm.size() == 2);
    CHECK(cm.base_distance(0, 1) == doctest::Approx(5.0));
    CHECK(cm.base_distance(1, 0) == doctest::Approx(5.0));
    CHECK(cm.base_distance(0, 0) == 0.0);
}

TEST_CASE("tsplib FULL_MATRIX is read directly") {
    const std::string text =
        "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
        "EDGE_WEIGHT_SECTION\n0 7\n7 0\nEOF\n";
    auto cm = parse_tsplib(text);
    CHECK(cm.base_distance(0, 1) == doctest::Approx(7.0));
}

TEST_CASE("tsplib LOWER_DIAG_ROW") {
    const std::string text =
        "DIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW\n"
        "EDGE_WEIGHT_SECTION\n0\n1 0\n2 3 0\nEOF\n";
    auto cm = parse_tsplib(text);
    CHECK(cm.base_distance(0, 2) == doctest::Approx(2.0));
    CHECK(cm.base_distance(2, 1) == doctest::Approx(3.0));
}

TEST_CASE("tsplib unsupported weight type errors out") {
    const std::string text =
        "DIMENSION: 2\nEDGE_WEIGHT_TYPE: GEO\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n";
    CHECK_THROWS_WITH_AS(parse_tsplib(text),
                         doctest::Contains("unsupported weight type"), Error);
}

TEST_CASE("tsplib malformed token") {
    const std::string text =
        "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 x 1\nEOF\n";
    CHECK_THROWS_AS(parse_tsplib(text), Error);
}

TEST_CASE("class cost formulas") {
    std::vector<Point> base{{0, 0}, {10, 0}, {0, 10}, {7, 7}};
    auto cm = CostModel::from_coords(base);

    auto inst1 = generate_instance(cm, 2, InstanceClass::I, 0, 42);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            CHECK(inst1.routing_cost(i, j) == doctest::Approx(cm.base_distance(i, j)));
            CHECK(inst1.assign_cost(i, j) == doctest::Approx(cm.base_distance(i, j)));
        }

    for (int alpha : {3, 5, 7, 9}) {
        auto inst2 = generate_instance(cm, 2, InstanceClass::II, alpha, 42);
        for (int i = 0; i < inst2.num_vertices(); ++i)
            for (int j = 0; j < inst2.num_vertices(); ++j) {
                if (i == j || (inst2.is_depot(i) && inst2.is_depot(j))) continue;
                const double l = inst2.routing_cost(i, j) / alpha;
                CHECK(inst2.assign_cost(i, j) == doctest::Approx((10 - alpha) * l));
                // class II identity: c + d = 10 l
                CHECK(inst2.routing_cost(i, j) + inst2.assign_cost(i, j) ==
                      doctest::Approx(10.0 * l));
            }
    }

    CHECK_THROWS_AS(generate_instance(cm, 2, InstanceClass::II, 4, 1), Error);

    auto mat = CostModel::from_matrix({{0, 1}, {1, 0}});
    CHECK_THROWS_AS(generate_instance(mat, 1, InstanceClass::II, 3, 1), Error);
}

TEST_CASE("generation is deterministic byte for byte") {
    auto a = random_instance(6, 2, 7);
    auto b = random_instance(6, 2, 7);
    CHECK(instance_to_json(a) == instance_to_json(b));
    auto c = random_instance(6, 2, 8);
    CHECK(instance_to_json(a) != instance_to_json(c));
}

TEST_CASE("instance json round trip") {
    auto inst = random_instance(5, 2, 3, InstanceClass::II, 7);
    auto back = instance_from_json(instance_to_json(inst));
    CHECK(back.num_customers() == 5);
    CHECK(back.num_depots() == 2);
    CHECK(back.alpha() == 7);
    for (int i = 0; i < inst.num_vertices(); ++i)
        for (int j = 0; j < inst.num_vertices(); ++j) {
            if (inst.is_depot(i) && inst.is_depot(j)) continue;
            CHECK(back.routing_cost(i, j) ==
                  doctest::Approx(inst.routing_cost(i, j)).epsilon(1e-8));
        }
}

TEST_CASE("solution cost") {
    SUBCASE("degenerate ring counts the edge twice") {
        // one customer (0), one depot (1)
        auto inst = make_instance(1, 1, {{0, 5}, {5, 0}}, {{0, 20}, {20, 0}});
        Solution s{{{1, {0}}}, {}};
        CHECK(solution_cost(inst, s) == doctest::Approx(10.0));
    }
    SUBCASE("ring plus assignment") {
        // customers 0(a),1(b),2(z); depot 3(r); ring r-a-b-r with edges 3,4,5
        std::vector<std::vector<double>> c{
            {0, 4, 1, 3}, {4, 0, 1, 5}, {1, 1, 0, 1}, {3, 5, 1, 0}};
        std::vector<std::vector<double>> d{
            {0, 1, 2, 1}, {1, 0, 1, 1}, {2, 1, 0, 9}, {1, 1, 9, 0}};
        auto inst = make_instance(3, 1, c, d);
        Solution s{{{3, {0, 1}}}, {{2, 0}}};
        CHECK(solution_cost(inst, s) == doctest::Approx(3 + 4 + 5 + 2));
    }
    SUBCASE("all customers on rings means routing cost only") {
        auto inst = random_instance(4, 1, 11);
        Solution s{{{4, {0, 1, 2, 3}}}, {}};
        double rc = inst.routing_cost(4, 0) + inst.routing_cost(0, 1) +
                    inst.routing_cost(1, 2) + inst.routing_cost(2, 3) +
                    inst.routing_cost(3, 4);
        CHECK(solution_cost(inst, s) == doctest::Approx(rc));
    }
}

TEST_CASE("feasibility checker") {
    auto inst = random_instance(4, 2, 5);
    SUBCASE("valid ring star") {
        Solution s{{{4, {0, 1}}}, {{2, 0}, {3, 5}}};
        CHECK(check_feasible(inst, s).empty());
    }
    SUBCASE("assignment target must be on a ring or a depot") {
        Solution s{{{4, {0, 1}}}, {{2, 3}, {3, 5}}};
        auto v = check_feasible(inst, s);
        CHECK(std::find(v.begin(), v.end(), "assignment-target") != v.end());
    }
    SUBCASE("cycle through two depots") {
        Solution s{{{4, {0, 5, 1}}}, {{2, 0}, {3, 0}}};
        auto v = check_feasible(inst, s);
        CHECK(std::find(v.begin(), v.end(), "path-elimination") != v.end());
    }
    SUBCASE("customer on two rings") {
        Solution s{{{4, {0, 1}}, {5, {1, 2}}}, {{3, 0}}};
        auto v = check_feasible(inst, s);
        CHECK(std::find(v.begin(), v.end(), "unique-assignment") != v.end());
    }
    SUBCASE("multiple rings per depot are allowed") {
        Solution s{{{4, {0, 1}}, {4, {2, 3}}}, {}};
        CHECK(check_feasible(inst, s).empty());
    }
}

TEST_CASE("incidence vectors") {
    SUBCASE("u=1 n=1 layout") {
        auto inst = make_instance(1, 1, {{0, 5}, {5, 0}}, {{0, 3}, {3, 0}});
        CHECK(inst.num_vars() == 5);  // 0 cc + 1 dc edge + 4 arcs

        Solution ring{{{1, {0}}}, {}};
        auto v = to_incidence(inst, ring);
        CHECK(v[inst.edge_index(1, 0)] == 2);
        CHECK(v[inst.arc_index(0, 0)] == 1);

        Solution assigned{{}, {{0, 1}}};
        auto w = to_incidence(inst, assigned);
        CHECK(w[inst.edge_index(1, 0)] == 0);
        CHECK(w[inst.arc_index(0, 1)] == 1);
        CHECK(w[inst.arc_index(0, 0)] == 0);
    }
    SUBCASE("assigned customer has zero incident x") {
        auto inst = random_instance(4, 2, 9);
        Solution s{{{4, {0, 1, 2}}}, {{3, 1}}};
        auto v = to_incidence(inst, s);
        for (int j = 0; j < inst.num_vertices(); ++j)
            if (j != 3) CHECK(v[inst.edge_index(3, j)] == 0);
        CHECK(v[inst.arc_index(3, 1)] == 1);
    }
    SUBCASE("equalities (2),(3),(7),(8) hold exactly and cost matches") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto inst = random_instance(5, 2, seed);
            Solution s{{{5, {0, 1}}, {6, {2}}}, {{3, 0}, {4, 6}}};
            auto v = to_incidence(inst, s);
            CHECK(equality_residual(inst, to_double(v)) == 0.0);
            CHECK(incidence_cost(inst, v) ==
                  doctest::Approx(solution_cost(inst, s)).epsilon(1e-9));
        }
    }
    SUBCASE("round trip through from_incidence") {
        auto inst = random_instance(6, 2, 13);
        Solution s{{{6, {0, 1, 2}}, {7, {3}}}, {{4, 1}, {5, 7}}};
        auto v = to_incidence(inst, s);
        auto back = from_incidence(inst, v);
        CHECK(check_feasible(inst, back).empty());
        CHECK(to_incidence(inst, back) == v);
    }
    SUBCASE("variable indexing is a bijection") {
        auto inst = random_instance(5, 3, 17);
        std::vector<int> hit(inst.num_vars(), 0);
        for (int i = 0; i < inst.num_vertices(); ++i)
            for (int j = i + 1; j < inst.num_vertices(); ++j) {
                if (inst.is_depot(i) && inst.is_depot(j)) continue;
                int col = inst.edge_index(i, j);
                CHECK(inst.edge_of(col) == std::pair<int, int>(i, j));
                ++hit[col];
            }
        for (int i = 0; i < inst.num_vertices(); ++i)
            for (int j = 0; j < inst.num_vertices(); ++j) {
                if (!inst.arc_exists(i, j)) continue;
                int col = inst.arc_index(i, j);
                CHECK(inst.arc_of(col) == std::pair<int, int>(i, j));
                ++hit[col];
            }
        for (int h : hit) CHECK(h == 1);
    }
}

TEST_CASE("2-path repair never increases cost") {
    // depot 1 -- customer 0 -- depot 2 as raw incidence
    auto inst = make_instance(1, 2, {{0, 5, 7}, {5, 0, 9}, {7, 9, 0}},
                              {{0, 1, 1}, {1, 0, 0}, {1, 0, 0}});
    IncidenceVector v(inst.num_vars(), 0);
    v[inst.edge_index(0, 1)] = 1;
    v[inst.edge_index(0, 2)] = 1;
    v[inst.arc_index(0, 0)] = 1;
    v[inst.arc_index(1, 1)] = 1;
    v[inst.arc_index(2, 2)] = 1;

    CHECK_THROWS_AS(from_incidence(inst, v), Error);
    auto repaired = from_incidence(inst, v, true);
    CHECK(check_feasible(inst, repaired).empty());
    CHECK(solution_cost(inst, repaired) == doctest::Approx(10.0));  // 2*min(5,7)
    CHECK(solution_cost(inst, repaired) <= incidence_cost(inst, v));
}
