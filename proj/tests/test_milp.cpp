#include "oracle/enumerate.hpp"
#include "slicenet/milp/simplex.hpp"
#include "slicenet/milp/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace slicenet::milp;

namespace {

MilpModel random_binary_model(std::mt19937_64& rng, int vars, int rows)
{
    std::uniform_int_distribution<int> coef(-6, 9);
    std::uniform_int_distribution<int> cost(-5, 12);
    std::uniform_int_distribution<int> rel(0, 5);
    MilpModel m;
    for (int j = 0; j < vars; ++j) {
        m.add_binary("x" + std::to_string(j));
        m.set_objective(j, cost(rng));
    }
    for (int i = 0; i < rows; ++i) {
        std::vector<Term> terms;
        int sum_pos = 0;
        for (int j = 0; j < vars; ++j) {
            if (rng() % 2 == 0) {
                const int c = coef(rng);
                terms.push_back({j, static_cast<double>(c)});
                sum_pos += std::max(c, 0);
            }
        }
        const int r = rel(rng);
        const double rhs = std::floor(sum_pos * 0.5);
        if (r <= 3) {
            m.add_constraint(terms, Relation::less_equal, rhs, "r" + std::to_string(i));
        } else if (r == 4) {
            m.add_constraint(terms, Relation::greater_equal, std::floor(rhs * 0.5),
                             "r" + std::to_string(i));
        } else {
            // equality rows kept to a cardinality form so many models stay feasible
            std::vector<Term> card;
            for (int j = 0; j < vars; j += 3) {
                card.push_back({j, 1.0});
            }
            m.add_constraint(card, Relation::equal, 1.0, "card" + std::to_string(i));
        }
    }
    return m;
}

bool adapter_available()
{
    return !ExternalSolver::default_command().empty();
}

} // namespace

TEST_CASE("lp relaxation: minimize x subject to x >= 3")
{
    MilpModel m;
    const int x = m.add_continuous("x");
    m.set_objective(x, 1.0);
    m.add_constraint({{x, 1.0}}, Relation::greater_equal, 3.0, "lo");
    const auto s = solve_lp_relaxation(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.value(x) == doctest::Approx(3.0));
    CHECK(s.objective_value == doctest::Approx(3.0));
}

TEST_CASE("lp relaxation: contradictory bounds are infeasible")
{
    MilpModel m;
    const int x = m.add_continuous("x");
    m.add_constraint({{x, 1.0}}, Relation::less_equal, -1.0, "neg");
    CHECK(solve_lp_relaxation(m).status == SolveStatus::infeasible);
    CHECK(solve_milp(m).status == SolveStatus::infeasible);
}

TEST_CASE("lp relaxation: unbounded direction is reported")
{
    MilpModel m;
    const int x = m.add_continuous("x");
    const int y = m.add_continuous("y");
    m.set_objective(x, -1.0);
    m.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::less_equal, 2.0, "r");
    CHECK(solve_lp_relaxation(m).status == SolveStatus::unbounded);
}

TEST_CASE("lp relaxation: small textbook problem")
{
    // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
    MilpModel m;
    const int x = m.add_continuous("x");
    const int y = m.add_continuous("y");
    m.set_objective(x, -3.0);
    m.set_objective(y, -5.0);
    m.add_constraint({{x, 1.0}}, Relation::less_equal, 4.0, "a");
    m.add_constraint({{y, 2.0}}, Relation::less_equal, 12.0, "b");
    m.add_constraint({{x, 3.0}, {y, 2.0}}, Relation::less_equal, 18.0, "c");
    const auto s = solve_lp_relaxation(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(-36.0));
    CHECK(s.value(x) == doctest::Approx(2.0));
    CHECK(s.value(y) == doctest::Approx(6.0));
}

TEST_CASE("milp: unconstrained positive costs give the zero vector")
{
    MilpModel m;
    for (int j = 0; j < 5; ++j) {
        m.add_binary("x" + std::to_string(j));
        m.set_objective(j, 1.0 + j);
    }
    const auto s = solve_milp(m);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective_value == 0.0);
    for (double v : s.assignment) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("milp: 4-variable knapsack matches enumeration")
{
    // max 10a + 13b + 7c + 8d st 4a + 6b + 3c + 5d <= 10
    MilpModel m;
    const double value[] = {10, 13, 7, 8};
    const double weight[] = {4, 6, 3, 5};
    std::vector<Term> row;
    for (int j = 0; j < 4; ++j) {
        m.add_binary("item" + std::to_string(j));
        m.set_objective(j, -value[j]);
        row.push_back({j, weight[j]});
    }
    m.add_constraint(row, Relation::less_equal, 10.0, "cap");
    const auto s = solve_milp(m);
    const auto e = oracle::enumerate_binary(m);
    REQUIRE(e.has_value());
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(std::abs(s.objective_value - e->objective) <= 1e-9);
    CHECK(e->objective == -23.0);
}

TEST_CASE("milp: random pure-binary models match exhaustive enumeration")
{
    std::mt19937_64 rng(20240611);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int vars = 1 + static_cast<int>(rng() % 12);
        const int rows = static_cast<int>(rng() % 6);
        const MilpModel m = random_binary_model(rng, vars, rows);
        const auto s = solve_milp(m);
        const auto e = oracle::enumerate_binary(m);
        CAPTURE(trial);
        if (!e) {
            CHECK(s.status == SolveStatus::infeasible);
            continue;
        }
        ++feasible;
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(std::abs(s.objective_value - e->objective) <= 1e-6);
        CHECK(m.max_violation(s.assignment) <= 1e-6);
        CHECK(m.max_integrality_violation(s.assignment) <= 1e-6);
        const auto r = solve_lp_relaxation(m);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.objective_value <= e->objective + 1e-6);
    }
    CHECK(feasible > 100);
}

TEST_CASE("milp: mixed model with continuous slack")
{
    // two items must be chosen; capacity overflow is paid for by a slack
    MilpModel m;
    const int a = m.add_binary("a");
    const int b = m.add_binary("b");
    const int c = m.add_binary("c");
    const int s = m.add_continuous("s");
    m.add_constraint({{a, 1}, {b, 1}, {c, 1}}, Relation::equal, 2.0, "pick");
    m.add_constraint({{a, 5}, {b, 4}, {c, 3}, {s, -1}}, Relation::less_equal, 6.0, "cap");
    m.set_objective(a, 1.0);
    m.set_objective(s, 1.0);
    const auto sol = solve_milp(m);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective_value == doctest::Approx(1.0));
    CHECK(sol.value(b) == 1.0);
    CHECK(sol.value(c) == 1.0);
    CHECK(sol.value(s) == doctest::Approx(1.0));
}

TEST_CASE("milp: node limit yields a flagged time_limit result")
{
    std::mt19937_64 rng(7);
    MilpModel m;
    std::vector<Term> row;
    for (int j = 0; j < 30; ++j) {
        m.add_binary("x" + std::to_string(j));
        m.set_objective(j, -static_cast<double>(10 + rng() % 90));
        row.push_back({j, static_cast<double>(10 + rng() % 90)});
    }
    m.add_constraint(row, Relation::less_equal, 500.5, "cap");
    SolveOptions opt;
    opt.node_limit = 3;
    opt.diving = false;
    const auto s = solve_milp(m, opt);
    CHECK(s.status == SolveStatus::time_limit);
    CHECK(s.nodes <= 3);
}

TEST_CASE("milp: repeated solves are deterministic")
{
    std::mt19937_64 rng(99);
    const MilpModel m = random_binary_model(rng, 12, 5);
    const auto a = solve_milp(m);
    const auto b = solve_milp(m);
    CHECK(a.status == b.status);
    CHECK(a.assignment == b.assignment);
    CHECK(a.nodes == b.nodes);
}

TEST_CASE("milp: lp dump carries constraint tags")
{
    MilpModel m;
    const int x = m.add_binary("x");
    m.add_constraint({{x, 1.0}}, Relation::less_equal, 1.0, "C2 vm 0");
    m.set_objective(x, 2.0);
    std::ostringstream out;
    write_lp_format(m, out);
    CHECK(out.str().find("C2 vm 0:") != std::string::npos);
    CHECK(out.str().find("Binaries") != std::string::npos);
}

TEST_CASE("model: validation rejects unknown variables")
{
    MilpModel m;
    m.add_binary("x");
    m.add_constraint({{3, 1.0}}, Relation::less_equal, 1.0, "bad");
    CHECK_THROWS_AS(m.validate(), ModelError);
}

TEST_CASE("model: duplicate terms are merged")
{
    MilpModel m;
    const int x = m.add_binary("x");
    m.add_constraint({{x, 1.0}, {x, 2.0}}, Relation::less_equal, 3.0, "dup");
    REQUIRE(m.constraints()[0].terms.size() == 1);
    CHECK(m.constraints()[0].terms[0].coef == 3.0);
}

TEST_CASE("adapter: missing program is a configuration error")
{
    CHECK_THROWS_AS(ExternalSolver(""), AdapterUnavailable);
    CHECK_THROWS_AS(ExternalSolver("/nonexistent/solver-binary"), AdapterUnavailable);
}

TEST_CASE("adapter: agrees with the internal solver")
{
    if (!adapter_available()) {
        MESSAGE("external adapter not available; skipped");
        return;
    }
    const ExternalSolver ext(ExternalSolver::default_command());

    SUBCASE("one variable round trip")
    {
        MilpModel m;
        const int x = m.add_binary("x");
        m.set_objective(x, -1.0);
        const auto s = ext.solve(m);
        REQUIRE(s.status == SolveStatus::optimal);
        CHECK(s.value(x) == 1.0);
        CHECK(s.objective_value == -1.0);
    }
    SUBCASE("random continuous LPs")
    {
        std::mt19937_64 rng(515);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 40; ++trial) {
            MilpModel m;
            const int n = 5 + static_cast<int>(rng() % 25);
            const int rows = 3 + static_cast<int>(rng() % 20);
            for (int j = 0; j < n; ++j) {
                m.add_continuous("x" + std::to_string(j), 0.0, rng() % 3 == 0 ? 5.0 : kInfinity);
                m.set_objective(j, 1.0 + u(rng));
            }
            for (int i = 0; i < rows; ++i) {
                std::vector<Term> t;
                for (int j = 0; j < n; ++j) {
                    if (rng() % 3 == 0) {
                        t.push_back({j, std::round(100 * u(rng)) * 10.0});
                    }
                }
                const Relation r = rng() % 2 ? Relation::greater_equal : Relation::less_equal;
                m.add_constraint(t, r, 50.0 * u(rng), "r" + std::to_string(i));
            }
            const auto a = solve_lp_relaxation(m);
            const auto b = ext.solve(m);
            CAPTURE(trial);
            REQUIRE(a.status == b.status);
            if (a.status == SolveStatus::optimal) {
                CHECK(std::abs(a.objective_value - b.objective_value)
                      <= 1e-6 * std::max(1.0, std::abs(b.objective_value)));
                CHECK(m.max_violation(a.assignment) <= 1e-6);
            }
        }
    }
    SUBCASE("random models")
    {
        std::mt19937_64 rng(4242);
        for (int trial = 0; trial < 25; ++trial) {
            const MilpModel m = random_binary_model(rng, 4 + static_cast<int>(rng() % 9), 4);
            const auto a = solve_milp(m);
            const auto b = ext.solve(m);
            CAPTURE(trial);
            REQUIRE(a.status == b.status);
            if (a.status == SolveStatus::optimal) {
                CHECK(std::abs(a.objective_value - b.objective_value) <= 1e-6);
            }
        }
    }
}
