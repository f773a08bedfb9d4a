#include "slicenet/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace slicenet;

namespace {

ScenarioConfig small_config()
{
    ScenarioConfig c;
    c.tenant_max = 3;
    c.replications = 2;
    c.seed = 4;
    return c;
}

std::string csv(const std::vector<SweepRecord>& records, bool wall = true)
{
    std::ostringstream out;
    emit_csv(records, out, wall);
    return out.str();
}

int count(const std::string& s, const std::string& what)
{
    int n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST_CASE("one record gives a header and one row")
{
    SweepRecord r;
    r.tenants = 1;
    r.offered = 1;
    r.total_cost = 12.5;
    r.acceptance_ratio = 1.0;
    const std::string out = csv({r});
    CHECK(out
          == "method,tenants,replication,total_cost,beta,power_w,acceptance_ratio,rejected,wall_ms,"
             "collapse,admission_limited,allocation_limited\n"
             "JRA,1,0,12.500000,0.000000,0.000000,1.000000,0,0.0,0,0,0\n");
    CHECK(csv({r}, false).find("wall_ms") == std::string::npos);
}

TEST_CASE("rows are sorted whatever the input order")
{
    SweepRecord a, b, c;
    a.method = Method::dra;
    a.tenants = 1;
    b.tenants = 2;
    c.tenants = 1;
    c.replication = 1;
    const std::string out = csv({a, b, c});
    CHECK(out.find("JRA,1,1") < out.find("JRA,2,0"));
    CHECK(out.find("JRA,2,0") < out.find("DRA,1,0"));
}

TEST_CASE("small sweep: record count, invariants, determinism")
{
    const auto config = small_config();
    const auto first = run_sweep(config);
    REQUIRE(first.size() == 3 * 2 * 2);
    for (const auto& r : first) {
        CHECK(r.acceptance_ratio >= 0.0);
        CHECK(r.acceptance_ratio <= 1.0);
        CHECK(r.rejected + static_cast<int>(std::lround(r.acceptance_ratio * r.offered)) == r.offered);
        CHECK(std::abs(r.total_cost - (config.weights.zeta * r.beta + config.weights.upsilon * r.power))
              <= 1e-6);
        if (r.tenants == 1) {
            CHECK(r.acceptance_ratio == 1.0);
        }
        if (r.method == Method::dra) {
            CHECK(r.joint_on_accepted <= r.total_cost + 1e-6);
        }
    }
    const auto second = run_sweep(config);
    CHECK(csv(first, false) == csv(second, false));
}

TEST_CASE("a single tenant count gives two records per replication")
{
    ScenarioConfig c;
    c.tenant_max = 1;
    c.replications = 3;
    CHECK(run_sweep(c).size() == 6);
}

TEST_CASE("config JSON round trip and errors")
{
    ScenarioConfig c = small_config();
    c.weights.zeta = 2e-4;
    c.vl_shape = VlShape::chain;
    c.time_limit_s = 30.0;
    std::stringstream ss;
    write_config_json(c, ss);
    const auto back = load_config_json(ss);
    std::ostringstream a, b;
    write_config_json(c, a);
    write_config_json(back, b);
    CHECK(a.str() == b.str());

    std::istringstream unknown(R"({"seed": 1, "tenants": 4})");
    CHECK_THROWS_AS(load_config_json(unknown), HarnessError);
    std::istringstream bad_range(R"({"tenant_range": [5, 2]})");
    CHECK_THROWS_AS(load_config_json(bad_range), HarnessError);
    std::istringstream bad_shape(R"({"vl_shape": "ring"})");
    CHECK_THROWS_AS(load_config_json(bad_shape), HarnessError);
    std::istringstream not_json("{seed");
    CHECK_THROWS_AS(load_config_json(not_json), HarnessError);
    std::istringstream defaults("{}");
    const auto d = load_config_json(defaults);
    CHECK(d.node_count == 4);
    CHECK(d.tenant_max == 16);
    CHECK(d.vms_per_slice == 3);
    CHECK(d.weights.upsilon == 1.0);
}

TEST_CASE("svg charts carry one series per method")
{
    const auto records = run_sweep(small_config());
    for (const auto f : {Figure::cost, Figure::acceptance, Figure::rejected, Figure::beta, Figure::time}) {
        std::ostringstream out;
        emit_svg(records, f, out);
        CHECK(count(out.str(), "<polyline") == 2);
        CHECK(out.str().rfind("<svg", 0) == 0);
    }
    CHECK(parse_figure("beta") == Figure::beta);
    CHECK_THROWS_AS(parse_figure("gantt"), HarnessError);
    std::ostringstream sink;
    CHECK_THROWS_AS(emit_svg({}, Figure::cost, sink), HarnessError);
}

TEST_CASE("write errors name the path")
{
    SweepRecord r;
    try {
        emit_csv({r}, std::filesystem::path("/nonexistent-dir/x.csv"));
        FAIL("no error");
    } catch (const HarnessError& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
    }
}
