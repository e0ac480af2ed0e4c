#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "mdrsp/polylab.hpp"
#include "mdrsp/search.hpp"
#include "test_util.hpp"

using namespace mdrsp;
using testing::make_instance;
using testing::random_instance;

TEST_CASE("nearest depot assignment is always feasible") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Instance inst = random_instance(6, 3, seed);
        Solution sol = search::nearest_depot_solution(inst);
        CHECK(check_feasible(inst, sol).empty());
        for (auto [i, t] : sol.assignment) {
            for (int d = inst.num_customers(); d < inst.num_vertices(); ++d)
                CHECK(inst.assign_cost(i, t) <= inst.assign_cost(i, d));
        }
    }
}

TEST_CASE("single customer, single depot: degenerate ring or assignment") {
    // routing cost 5 each way (degenerate ring costs 10), assignment cost 12:
    // the optimum is the two-copy ring at cost 10
    Instance inst =
        make_instance(1, 1, {{0, 5}, {5, 0}}, {{0, 12}, {12, 0}});
    search::Report rep = search::branch_and_cut(inst, {});
    REQUIRE(rep.termination == search::Termination::Optimal);
    CHECK(rep.upper_bound == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(rep.lower_bound == doctest::Approx(rep.upper_bound));
    REQUIRE(rep.incumbent.has_value());
    CHECK(solution_cost(inst, *rep.incumbent) ==
          doctest::Approx(10.0).epsilon(1e-9));
    // cheap assignment flips the optimum
    Instance inst2 =
        make_instance(1, 1, {{0, 5}, {5, 0}}, {{0, 8}, {8, 0}});
    search::Report rep2 = search::branch_and_cut(inst2, {});
    CHECK(rep2.upper_bound == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("matches exhaustive optimum on small random instances") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        int u = 4 + (int)(seed % 3);
        int n = 2 + (int)(seed % 2);
        auto cls = seed % 2 ? InstanceClass::II : InstanceClass::I;
        Instance inst = random_instance(u, n, seed, cls, 3 + 2 * (seed % 4));
        Solution oracle = polylab::brute_force_opt(inst);
        double oracle_cost = solution_cost(inst, oracle);
        search::Report rep = search::branch_and_cut(inst, {});
        REQUIRE(rep.termination == search::Termination::Optimal);
        INFO("seed=", seed, " u=", u, " n=", n);
        CHECK(rep.upper_bound ==
              doctest::Approx(oracle_cost).epsilon(1e-7));
        REQUIRE(rep.incumbent.has_value());
        CHECK(check_feasible(inst, *rep.incumbent).empty());
        CHECK(solution_cost(inst, *rep.incumbent) ==
              doctest::Approx(oracle_cost).epsilon(1e-7));
        ++checked;
    }
    CHECK(checked == 12);
}

TEST_CASE("root lower bound never exceeds the optimum") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Instance inst = random_instance(6, 2, seed);
        search::Report rep = search::branch_and_cut(inst, {});
        REQUIRE(rep.termination == search::Termination::Optimal);
        CHECK(rep.root_lb <= rep.upper_bound + 1e-7);
        CHECK(rep.lower_bound <= rep.upper_bound + 1e-9);
    }
}

TEST_CASE("disabling cut families cannot change the optimum") {
    Instance inst = random_instance(6, 2, 7);
    search::Report full = search::branch_and_cut(inst, {});
    search::Params weak;
    weak.enable_pec = false;
    weak.enable_two_match = false;
    search::Report rep = search::branch_and_cut(inst, weak);
    REQUIRE(rep.termination == search::Termination::Optimal);
    CHECK(rep.upper_bound == doctest::Approx(full.upper_bound).epsilon(1e-7));
    CHECK(rep.root_lb <= full.root_lb + 1e-7);
}

TEST_CASE("time limit contract: valid bounds, prompt return") {
    Instance inst = random_instance(15, 3, 42);
    search::Params p;
    p.time_limit = 0.01;
    search::Report rep = search::branch_and_cut(inst, p);
    CHECK(rep.wall_seconds < 5.0);
    CHECK(rep.lower_bound <= rep.upper_bound + 1e-9);
    REQUIRE(rep.incumbent.has_value());
    CHECK(check_feasible(inst, *rep.incumbent).empty());
    CHECK(solution_cost(inst, *rep.incumbent) ==
          doctest::Approx(rep.upper_bound).epsilon(1e-9));
}

TEST_CASE("deterministic for a fixed seed") {
    Instance inst = random_instance(7, 2, 3);
    search::Report a = search::branch_and_cut(inst, {});
    search::Report b = search::branch_and_cut(inst, {});
    CHECK(a.upper_bound == b.upper_bound);
    CHECK(a.root_lb == b.root_lb);
    CHECK(a.nodes == b.nodes);
    CHECK(a.cuts.pair == b.cuts.pair);
    CHECK(a.cuts.sec == b.cuts.sec);
    CHECK(a.cuts.pec == b.cuts.pec);
    CHECK(a.cuts.two_match == b.cuts.two_match);
}

TEST_CASE("report serializes to well-formed JSON") {
    Instance inst = random_instance(5, 2, 1);
    search::Report rep = search::branch_and_cut(inst, {});
    auto j = nlohmann::json::parse(search::report_to_json(inst, rep));
    CHECK(j["termination"] == "optimal");
    CHECK(j["upper_bound"].get<double>() ==
          doctest::Approx(rep.upper_bound));
    CHECK(j["cuts"].contains("sec"));
    CHECK(j.contains("solution"));
}
