#include "fixtures.hpp"
#include "slicenet/admission.hpp"

#include <doctest.h>

#include <sstream>

using namespace slicenet;

namespace {

ElasticReport solve_elastic(const PhysicalNetwork& net, const RequestBatch& batch, ElasticBase base)
{
    const auto f = build_elastic_model(net, batch, base);
    milp::SolverConfig c;
    c.options.branch_priority = branch_priority(f);
    const auto sol = milp::solve(f.model, c);
    REQUIRE(sol.status == milp::SolveStatus::optimal);
    return read_slacks(f, sol.assignment);
}

double compute_slack(const ElasticReport& r)
{
    double s = 0.0;
    for (const auto& n : r.sigma_vm) {
        s += n[0];
    }
    return s;
}

std::vector<SliceRequest> light_slices(int count)
{
    std::vector<SliceRequest> out;
    for (int t = 0; t < count; ++t) {
        out.push_back(fixture::slice(t, 3, 1000.0, 1.0, 100.0));
    }
    return out;
}

} // namespace

TEST_CASE("elastic slack is zero when the batch fits")
{
    const auto net = fixture::complete(4);
    CHECK(solve_elastic(net, fixture::batch(light_slices(3)), ElasticBase::joint).total
          == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(solve_elastic(net, fixture::batch(light_slices(8)), ElasticBase::joint).total
          == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(solve_elastic(net, RequestBatch{}, ElasticBase::joint).total == 0.0);
}

TEST_CASE("ten light slices overflow four nodes by at least 2000 MHz")
{
    const auto net = fixture::complete(4);
    const auto r = solve_elastic(net, fixture::batch(light_slices(10)), ElasticBase::joint);
    CHECK(compute_slack(r) >= 2000.0 - 1e-6);
}

TEST_CASE("a fitting batch is accepted in one round")
{
    const auto net = fixture::complete(4);
    const auto out = run_ac_jra(net, fixture::batch(light_slices(4)));
    CHECK(out.accepted.size() == 4);
    CHECK(out.rejected.empty());
    CHECK(out.rounds == 1);
    REQUIRE(out.witness);
    const auto f = build_jra_model(net, out.accepted, {});
    CHECK(f.model.max_violation(encode_placement(f, *out.witness)) <= 1e-6);
}

TEST_CASE("one slice too many: exactly one rejection, lowest id first")
{
    // each slice is one VM filling a whole node
    const auto net = fixture::complete(4);
    std::vector<SliceRequest> slices;
    for (int t = 0; t < 5; ++t) {
        slices.push_back(fixture::slice(t, 1, 7000.0));
    }
    const auto out = run_ac_jra(net, fixture::batch(slices));
    REQUIRE(out.rejected.size() == 1);
    CHECK(out.rejected[0].id == SliceId{0, 0});
    CHECK(out.rejected[0].reason == RejectReason::compute);
    CHECK(out.accepted.size() == 4);
    CHECK(out.rounds == 2);

    const auto nodes_only = run_ac_dma(net, fixture::batch(slices));
    REQUIRE(nodes_only.rejected.size() == 1);
    CHECK(nodes_only.rejected[0].id == SliceId{0, 0});
}

TEST_CASE("memory is checked after compute")
{
    const auto net = fixture::complete(2);
    std::vector<SliceRequest> slices{fixture::slice(0, 1, 1000.0, 1e4, 10.0, 500.0),
                                     fixture::slice(1, 1, 1000.0, 1e4, 10.0, 500.0),
                                     fixture::slice(2, 1, 1000.0, 1e4, 10.0, 600.0)};
    const auto out = run_ac_jra(net, fixture::batch(slices));
    REQUIRE(out.rejected.size() == 1);
    CHECK(out.rejected[0].reason == RejectReason::memory);
    // largest memory demand goes first
    CHECK(out.rejected[0].id == SliceId{2, 0});
}

TEST_CASE("a delay bound below every path is rejected for delay")
{
    // two VMs that cannot share a node, joined by a VL tighter than the only link
    std::vector<CloudNode> nodes{fixture::node(0, 8000.0), fixture::node(1, 8000.0)};
    PhysicalNetwork raw(nodes, {fixture::inter(0, 1, 1e6, 5.0), fixture::intra(0), fixture::intra(1)});
    const auto net = enumerate_paths(raw, 1);
    const auto tight = fixture::slice(0, 2, 5000.0, 1e4, 1.0);
    const auto easy = fixture::slice(1, 1, 1000.0);
    const auto out = run_ac_jra(net, fixture::batch({tight, easy}));
    REQUIRE(out.rejected.size() == 1);
    CHECK(out.rejected[0].id == SliceId{0, 0});
    CHECK(out.rejected[0].reason == RejectReason::delay);
    CHECK(out.accepted.size() == 1);
}

TEST_CASE("bandwidth overflow on the links stage")
{
    // both slices pinned apart; the single inter link fits only one of them
    const auto net = fixture::complete(2, 1.5e4);
    const auto batch = fixture::batch({fixture::slice(0, 2, 1000.0, 1e4), fixture::slice(1, 2, 1000.0, 1.2e4)});
    Placement fixed = empty_placement(net, batch);
    for (std::size_t v = 0; v < 4; ++v) {
        fixed.xi[v][v % 2] = 1;
    }
    fixed.gamma = {1, 1};
    const auto out = run_ac_dla(net, batch, fixed);
    REQUIRE(out.rejected.size() == 1);
    CHECK(out.rejected[0].reason == RejectReason::bandwidth);
    CHECK(out.rejected[0].id == SliceId{1, 0});
}

TEST_CASE("links stage with no VLs rejects nothing")
{
    const auto net = fixture::complete(2);
    const auto batch = fixture::batch({fixture::slice(0, 1), fixture::slice(1, 1)});
    Placement fixed = empty_placement(net, batch);
    fixed.xi[0][0] = fixed.xi[1][1] = 1;
    fixed.gamma = {1, 1};
    const auto out = run_ac_dla(net, batch, fixed);
    CHECK(out.rejected.empty());
    CHECK(out.rounds == 1);
}

TEST_CASE("links stage turns everything away when some VM is unplaced")
{
    const auto net = fixture::complete(2);
    const auto batch = fixture::batch({fixture::slice(0, 2), fixture::slice(1, 2)});
    Placement fixed = empty_placement(net, batch);
    fixed.xi[0][0] = fixed.xi[1][0] = 1;
    fixed.gamma = {1, 0};
    const auto out = run_ac_dla(net, batch, fixed);
    CHECK(out.accepted.empty());
    REQUIRE(out.rejected.size() == 2);
    CHECK(out.rejected[0].reason == RejectReason::unroutable);
}

TEST_CASE("full-size batches: terminate within |batch| rounds and leave a feasible witness")
{
    milp::SolverConfig c;
    c.options.node_limit = 100;
    for (std::uint64_t seed : {1, 2}) {
        const auto net = generate_random_topology(4, seed);
        for (int t : {8, 11}) {
            const auto batch = generate_batch(t, 1, 3, VlShape::mesh, seed);
            const auto out = run_ac_jra(net, batch, c);
            CHECK(out.rounds <= t);
            CHECK(out.accepted.size() + out.rejected.size() == batch.size());
            REQUIRE(out.witness);
            const auto f = build_jra_model(net, out.accepted, {});
            CHECK(f.model.max_violation(encode_placement(f, *out.witness)) <= 1e-6);
            if (t == 11) {
                CHECK(!out.rejected.empty());
            }
        }
    }
}

TEST_CASE("admission JSON lists rejections with their reasons")
{
    const auto net = fixture::complete(4);
    std::vector<SliceRequest> slices;
    for (int t = 0; t < 5; ++t) {
        slices.push_back(fixture::slice(t, 1, 7000.0));
    }
    std::ostringstream out;
    write_admission_json(run_ac_jra(net, fixture::batch(slices)), out);
    CHECK(out.str().find("\"compute\"") != std::string::npos);
    CHECK(out.str().find("\"rounds\": 2") != std::string::npos);
}
