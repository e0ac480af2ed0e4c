#include <doctest.h>

#include <array>
#include <random>

#include "mdrsp/lp.hpp"

using namespace mdrsp::lp;

TEST_CASE("single variable minimum") {
    LpModel m;
    int x = m.add_column(1.0, 0.0, 10.0);
    m.add_row({{{x, 1.0}}, Sense::GE, 1.0});
    auto s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.values[x] == doctest::Approx(1.0));
}

TEST_CASE("contradictory rows are infeasible") {
    LpModel m;
    int x = m.add_column(1.0, 0.0, 10.0);
    m.add_row({{{x, 1.0}}, Sense::GE, 1.0});
    m.add_row({{{x, 1.0}}, Sense::LE, 0.0});
    CHECK(solve(m).status == SolveStatus::Infeasible);
}

TEST_CASE("face optimum: objective is the contract") {
    // minimize -x-y over x+y <= 1, 0 <= x,y <= 1.
    // vertices of the feasible polygon: (0,0) -> 0, (1,0) -> -1, (0,1) -> -1.
    LpModel m;
    int x = m.add_column(-1.0, 0.0, 1.0);
    int y = m.add_column(-1.0, 0.0, 1.0);
    m.add_row({{{x, 1.0}, {y, 1.0}}, Sense::LE, 1.0});
    auto s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-1.0));
    CHECK(s.values[x] + s.values[y] == doctest::Approx(1.0));
}

TEST_CASE("equality rows and fixed columns") {
    LpModel m;
    int x = m.add_column(2.0, 0.0, 5.0);
    int y = m.add_column(3.0, 1.0, 1.0);  // fixed to 1
    m.add_row({{{x, 1.0}, {y, 1.0}}, Sense::EQ, 3.0});
    auto s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.values[x] == doctest::Approx(2.0));
    CHECK(s.objective == doctest::Approx(7.0));
}

TEST_CASE("adding a cutting row never lowers the objective") {
    LpModel m;
    int x = m.add_column(1.0, 0.0, 4.0);
    int y = m.add_column(1.0, 0.0, 4.0);
    m.add_row({{{x, 1.0}, {y, 1.0}}, Sense::GE, 2.0});
    auto s1 = solve(m);
    REQUIRE(s1.status == SolveStatus::Optimal);

    m.basis_hint = s1.basis;
    m.add_row({{{x, 1.0}}, Sense::GE, 1.5});
    auto s2 = solve(m);
    REQUIRE(s2.status == SolveStatus::Optimal);
    CHECK(s2.objective >= s1.objective - 1e-9);
    CHECK(s2.values[x] >= 1.5 - 1e-9);
}

TEST_CASE("bound tightening restricts, crossing bounds is infeasible") {
    LpModel m;
    int x = m.add_column(-1.0, 0.0, 2.0);
    m.add_row({{{x, 1.0}}, Sense::LE, 5.0});
    auto s1 = solve(m);
    REQUIRE(s1.status == SolveStatus::Optimal);
    CHECK(s1.objective == doctest::Approx(-2.0));

    m.basis_hint = s1.basis;
    m.set_upper(x, 1.0);
    auto s2 = solve(m);
    REQUIRE(s2.status == SolveStatus::Optimal);
    CHECK(s2.objective >= s1.objective - 1e-9);
    CHECK(s2.objective == doctest::Approx(-1.0));

    m.set_lower(x, 3.0);  // above the upper bound
    CHECK(solve(m).status == SolveStatus::Infeasible);
}

namespace {

// random LPs cross-checked against vertex enumeration on 2 variables
double enumerate_2d_min(double c0, double c1,
                        const std::vector<std::array<double, 3>>& rows) {
    // feasible region: 0 <= x,y <= 1 and a*x + b*y <= r per row; the optimum
    // sits at an intersection point of two active constraints (or box corners)
    std::vector<std::array<double, 3>> all = rows;
    all.push_back({1, 0, 1});
    all.push_back({-1, 0, 0});
    all.push_back({0, 1, 1});
    all.push_back({0, -1, 0});
    double best = std::numeric_limits<double>::infinity();
    const int k = static_cast<int>(all.size());
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double det = all[i][0] * all[j][1] - all[i][1] * all[j][0];
            if (std::abs(det) < 1e-9) continue;
            const double x = (all[i][2] * all[j][1] - all[i][1] * all[j][2]) / det;
            const double y = (all[i][0] * all[j][2] - all[i][2] * all[j][0]) / det;
            bool ok = true;
            for (const auto& r : all)
                if (r[0] * x + r[1] * y > r[2] + 1e-9) ok = false;
            if (ok) best = std::min(best, c0 * x + c1 * y);
        }
    return best;
}

}  // namespace

TEST_CASE("random 2d LPs match vertex enumeration") {
    std::mt19937_64 rng(99);
    auto uni = [&]() { return (static_cast<int>(rng() % 2000) - 1000) / 500.0; };
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        LpModel m;
        const double c0 = uni(), c1 = uni();
        int x = m.add_column(c0, 0.0, 1.0);
        int y = m.add_column(c1, 0.0, 1.0);
        std::vector<std::array<double, 3>> rows;
        const int nr = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < nr; ++i) {
            std::array<double, 3> r{uni(), uni(), std::abs(uni())};
            rows.push_back(r);
            m.add_row({{{x, r[0]}, {y, r[1]}}, Sense::LE, r[2]});
        }
        const double expected = enumerate_2d_min(c0, c1, rows);
        auto s = solve(m);
        REQUIRE(s.status == SolveStatus::Optimal);  // origin is always feasible
        CHECK(s.objective == doctest::Approx(expected).epsilon(1e-7));
        ++solved;
    }
    CHECK(solved == 200);
}

TEST_CASE("determinism: identical model gives identical objective") {
    auto build = [] {
        LpModel m;
        std::mt19937_64 rng(7);
        std::vector<int> cols;
        for (int j = 0; j < 20; ++j)
            cols.push_back(m.add_column((rng() % 100) / 10.0 - 5.0, 0.0, 2.0));
        for (int i = 0; i < 12; ++i) {
            Row r;
            for (int j = 0; j < 20; ++j)
                if (rng() % 3 == 0) r.coeffs.push_back({cols[j], (rng() % 19) / 3.0 - 3.0});
            r.sense = i % 2 ? Sense::LE : Sense::GE;
            r.rhs = (i % 2 ? 1.0 : -1.0) * static_cast<double>(rng() % 5);
            m.add_row(r);
        }
        return m;
    };
    auto a = solve(build());
    auto b = solve(build());
    REQUIRE(a.status == b.status);
    if (a.status == SolveStatus::Optimal)
        CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("optimal solutions satisfy every row") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        LpModel m;
        const int nc = 3 + static_cast<int>(rng() % 8);
        for (int j = 0; j < nc; ++j)
            m.add_column((static_cast<int>(rng() % 200) - 100) / 25.0, 0.0, 1.0 + (rng() % 2));
        const int nr = 2 + static_cast<int>(rng() % 6);
        for (int i = 0; i < nr; ++i) {
            Row r;
            for (int j = 0; j < nc; ++j)
                if (rng() % 2) r.coeffs.push_back({j, (rng() % 11) / 2.0 - 2.5});
            if (r.coeffs.empty()) r.coeffs.push_back({0, 1.0});
            r.sense = Sense::LE;
            r.rhs = (rng() % 40) / 10.0;
            m.add_row(r);
        }
        auto s = solve(m);
        if (s.status != SolveStatus::Optimal) continue;
        for (int i = 0; i < m.num_rows(); ++i) {
            double lhs = 0.0;
            for (auto [c, v] : m.row(i).coeffs) lhs += v * s.values[c];
            CHECK(lhs <= m.row(i).rhs + 1e-6);
        }
        for (int j = 0; j < m.num_cols(); ++j) {
            CHECK(s.values[j] >= m.lower(j) - 1e-6);
            CHECK(s.values[j] <= m.upper(j) + 1e-6);
        }
    }
}

TEST_CASE("lp format dump mentions every row") {
    LpModel m;
    int x = m.add_column(1.0, 0.0, 1.0);
    m.add_row({{{x, 1.0}}, Sense::GE, 0.5});
    auto text = to_lp_format(m);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find(">= 0.5") != std::string::npos);
}
