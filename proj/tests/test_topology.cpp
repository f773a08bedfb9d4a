#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace slicenet;

namespace {

// Independent DFS over simple node sequences, inter links only.
void dfs(const PhysicalNetwork& net, int at, int target, int max_hops, std::vector<int>& seq,
         std::set<std::vector<int>>& out)
{
    if (at == target) {
        out.insert(seq);
        return;
    }
    if (static_cast<int>(seq.size()) - 1 == max_hops) {
        return;
    }
    for (const auto& l : net.links()) {
        if (l.kind != LinkKind::inter) {
            continue;
        }
        int next = -1;
        if (l.u == at) {
            next = l.v;
        } else if (l.v == at) {
            next = l.u;
        }
        if (next < 0 || std::find(seq.begin(), seq.end(), next) != seq.end()) {
            continue;
        }
        seq.push_back(next);
        dfs(net, next, target, max_hops, seq, out);
        seq.pop_back();
    }
}

} // namespace

TEST_CASE("complete graph on three nodes has a direct and a two-hop path")
{
    const auto net = fixture::complete(3, 1e5, 1.0, 500.0, 2);
    const auto& p = net.paths(0, 2);
    REQUIRE(p.size() == 2);
    CHECK(p[0].nodes == std::vector<int>{0, 2});
    CHECK(p[1].nodes == std::vector<int>{0, 1, 2});
    CHECK(p[0].links.size() == 1);
    CHECK(p[1].links.size() == 2);
    CHECK(p[1].uses(p[1].links[0]));
}

TEST_CASE("single node only has its intra path")
{
    for (int hops : {0, 1, 4}) {
        const auto net = enumerate_paths(PhysicalNetwork({fixture::node(0)}, {fixture::intra(0)}), hops);
        const auto& p = net.paths(0, 0);
        REQUIRE(p.size() == 1);
        CHECK(p[0].links == std::vector<int>{net.intra_link(0)});
    }
}

TEST_CASE("line graph with one hop allowed is disconnected between its ends")
{
    PhysicalNetwork line({fixture::node(0), fixture::node(1), fixture::node(2)},
                         {fixture::inter(0, 1), fixture::inter(1, 2), fixture::intra(0),
                          fixture::intra(1), fixture::intra(2)});
    CHECK_THROWS_AS(enumerate_paths(line, 1), DisconnectedGraph);
    CHECK(enumerate_paths(line, 2).paths(0, 2).size() == 1);
}

TEST_CASE("path delay sums link delays")
{
    PhysicalNetwork line({fixture::node(0), fixture::node(1), fixture::node(2)},
                         {fixture::inter(0, 1, 1e5, 1.5), fixture::inter(1, 2, 1e5, 2.0),
                          fixture::intra(0), fixture::intra(1), fixture::intra(2)});
    const auto net = enumerate_paths(line, 2);
    CHECK(path_delay(net.paths(0, 2)[0], net) == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(path_delay(net.paths(1, 1)[0], net) == 0.0);
    CHECK(path_delay(PhysicalPath{}, net) == 0.0);
}

TEST_CASE("generated topologies keep the fixed intra figures")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto net = generate_random_topology(4, seed);
        CHECK(net.node_count() == 4);
        int intra = 0;
        for (const auto& l : net.links()) {
            if (l.kind == LinkKind::intra) {
                ++intra;
                CHECK(l.bandwidth == 1e7);
                CHECK(l.delay == 0.0);
                CHECK(l.u == l.v);
            } else {
                CHECK(l.u != l.v);
                CHECK(l.bandwidth >= 9e4);
                CHECK(l.bandwidth <= 1.9e5);
            }
        }
        CHECK(intra == 4);
    }
    const auto one = generate_random_topology(1, 3);
    CHECK(one.node_count() == 1);
    CHECK(one.link_count() == 1);
}

TEST_CASE("same seed gives the same network")
{
    std::ostringstream a, b, c;
    write_topology_json(generate_random_topology(4, 7), a);
    write_topology_json(generate_random_topology(4, 7), b);
    write_topology_json(generate_random_topology(4, 8), c);
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
}

TEST_CASE("enumerated paths equal a brute-force DFS and are ordered")
{
    TopologyParams params;
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        for (int hops : {2, 3}) {
            params.max_hops = hops;
            PhysicalNetwork net;
            try {
                net = generate_random_topology(5, seed, params);
            } catch (const DisconnectedGraph&) {
                continue;
            }
            for (int s = 0; s < 5; ++s) {
                for (int t = 0; t < 5; ++t) {
                    if (s == t) {
                        continue;
                    }
                    std::set<std::vector<int>> expected;
                    std::vector<int> seq{s};
                    dfs(net, s, t, hops, seq, expected);
                    const auto& got = net.paths(s, t);
                    std::set<std::vector<int>> actual;
                    for (std::size_t i = 0; i < got.size(); ++i) {
                        actual.insert(got[i].nodes);
                        CHECK(got[i].ordinal == static_cast<int>(i));
                        if (i > 0) {
                            const auto& prev = got[i - 1].nodes;
                            const auto& cur = got[i].nodes;
                            CHECK((prev.size() < cur.size() || (prev.size() == cur.size() && prev < cur)));
                        }
                    }
                    CHECK(actual == expected);
                }
            }
        }
    }
}

TEST_CASE("topology JSON round trip")
{
    const auto net = generate_random_topology(4, 11);
    std::stringstream ss;
    write_topology_json(net, ss);
    const auto back = load_topology_json(ss);
    std::ostringstream again;
    write_topology_json(back, again);
    CHECK(again.str() == ss.str());
}

TEST_CASE("topology JSON without intra links gets the default ones")
{
    std::istringstream in(R"({"nodes":[{"id":0,"com_mhz":7000,"mem_gb":800,"sto_gb":2000,"p_idle_w":100,"p_max_w":200},
                                      {"id":1,"com_mhz":7000,"mem_gb":800,"sto_gb":2000,"p_idle_w":100,"p_max_w":200}],
                             "links":[{"u":0,"v":1,"bw_kbps":1e5,"delay_ms":1,"psi":300}],"max_hops":2})");
    const auto net = load_topology_json(in);
    CHECK(net.link_count() == 3);
    const auto& l = net.links()[static_cast<std::size_t>(net.intra_link(1))];
    CHECK(l.bandwidth == 1e7);
    CHECK(l.unit_cost == 1.0);
}
