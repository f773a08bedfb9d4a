#include "slicenet/topology.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <set>

namespace slicenet {

using nlohmann::json;

const char* to_string(Resource r)
{
    switch (r) {
    case Resource::compute:
        return "compute";
    case Resource::memory:
        return "memory";
    case Resource::storage:
        return "storage";
    }
    return "?";
}

DisconnectedGraph::DisconnectedGraph(int s, int t, int max_hops)
    : TopologyError("no path from node " + std::to_string(s) + " to node " + std::to_string(t)
                    + " within " + std::to_string(max_hops) + " hops"),
      source(s), target(t)
{
}

PhysicalNetwork::PhysicalNetwork(std::vector<CloudNode> nodes, std::vector<PhysicalLink> links)
    : nodes_(std::move(nodes)), links_(std::move(links))
{
    const auto n = static_cast<int>(nodes_.size());
    for (int i = 0; i < n; ++i) {
        const auto& node = nodes_[static_cast<std::size_t>(i)];
        if (node.id != i) {
            throw TopologyError("node ids must be 0..N-1 in order; found " + std::to_string(node.id)
                                + " at position " + std::to_string(i));
        }
        if (!(node.capacity.compute > 0 && node.capacity.memory > 0 && node.capacity.storage > 0)) {
            throw TopologyError("node " + std::to_string(i) + " has a non-positive capacity");
        }
        if (!(node.power_idle >= 0 && node.power_idle <= node.power_max)) {
            throw TopologyError("node " + std::to_string(i) + " needs 0 <= P_idle <= P_max");
        }
    }
    intra_.assign(static_cast<std::size_t>(n), -1);
    std::set<std::pair<int, int>> seen;
    for (std::size_t id = 0; id < links_.size(); ++id) {
        auto& l = links_[id];
        const std::string name = "link " + std::to_string(id);
        if (l.u < 0 || l.u >= n || l.v < 0 || l.v >= n) {
            throw TopologyError(name + " references a missing node");
        }
        if (!(l.bandwidth > 0)) {
            throw TopologyError(name + " has non-positive bandwidth");
        }
        if (!(l.delay >= 0) || !(l.unit_cost >= 0)) {
            throw TopologyError(name + " has a negative delay or unit cost");
        }
        if ((l.kind == LinkKind::intra) != (l.u == l.v)) {
            throw TopologyError(name + ": kind must be intra exactly when both endpoints are equal");
        }
        if (l.u > l.v) {
            std::swap(l.u, l.v);
        }
        if (!seen.insert({l.u, l.v}).second) {
            throw TopologyError(name + " duplicates an earlier link between the same nodes");
        }
        if (l.kind == LinkKind::intra) {
            intra_[static_cast<std::size_t>(l.u)] = static_cast<int>(id);
        }
    }
    for (int i = 0; i < n; ++i) {
        if (intra_[static_cast<std::size_t>(i)] < 0) {
            throw TopologyError("node " + std::to_string(i) + " has no intra link");
        }
    }
}

const std::vector<PhysicalPath>& PhysicalNetwork::paths(int source, int target) const
{
    const auto n = node_count();
    if (paths_.empty()) {
        throw TopologyError("paths have not been enumerated");
    }
    if (source < 0 || target < 0 || static_cast<std::size_t>(source) >= n
        || static_cast<std::size_t>(target) >= n) {
        throw TopologyError("path query outside the node range");
    }
    return paths_[static_cast<std::size_t>(source) * n + static_cast<std::size_t>(target)];
}

int PhysicalNetwork::intra_link(int node) const
{
    return intra_.at(static_cast<std::size_t>(node));
}

PhysicalNetwork PhysicalNetwork::with_unit_costs(const std::vector<double>& costs) const
{
    if (costs.size() != links_.size()) {
        throw TopologyError("unit cost vector length does not match link count");
    }
    PhysicalNetwork copy = *this;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (!(costs[i] >= 0)) {
            throw TopologyError("negative unit cost");
        }
        copy.links_[i].unit_cost = costs[i];
    }
    return copy;
}

namespace {

struct Adjacent {
    int node;
    int link;
};

void extend(const std::vector<std::vector<Adjacent>>& adj, int max_hops,
            std::vector<int>& nodes, std::vector<int>& links, std::vector<char>& on_path,
            std::vector<std::vector<std::pair<std::vector<int>, std::vector<int>>>>& found)
{
    const int here = nodes.back();
    if (nodes.size() > 1) {
        found[static_cast<std::size_t>(here)].emplace_back(nodes, links);
    }
    if (static_cast<int>(links.size()) == max_hops) {
        return;
    }
    for (const auto& a : adj[static_cast<std::size_t>(here)]) {
        if (on_path[static_cast<std::size_t>(a.node)]) {
            continue;
        }
        on_path[static_cast<std::size_t>(a.node)] = 1;
        nodes.push_back(a.node);
        links.push_back(a.link);
        extend(adj, max_hops, nodes, links, on_path, found);
        nodes.pop_back();
        links.pop_back();
        on_path[static_cast<std::size_t>(a.node)] = 0;
    }
}

} // namespace

PhysicalNetwork enumerate_paths(const PhysicalNetwork& network, int max_hops)
{
    if (max_hops < 0) {
        throw TopologyError("max_hops must be nonnegative");
    }
    const std::size_t n = network.node_count();
    const std::size_t link_count = network.link_count();
    std::vector<std::vector<Adjacent>> adj(n);
    for (std::size_t id = 0; id < link_count; ++id) {
        const auto& l = network.links()[id];
        if (l.kind == LinkKind::inter) {
            adj[static_cast<std::size_t>(l.u)].push_back({l.v, static_cast<int>(id)});
            adj[static_cast<std::size_t>(l.v)].push_back({l.u, static_cast<int>(id)});
        }
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end(), [](const Adjacent& x, const Adjacent& y) {
            return x.node < y.node;
        });
    }

    PhysicalNetwork out = network;
    out.paths_.assign(n * n, {});
    out.max_hops_ = max_hops;
    auto make = [&](int s, int t, std::vector<int> nodes, std::vector<int> links) {
        PhysicalPath p;
        p.source = s;
        p.target = t;
        p.nodes = std::move(nodes);
        p.links = std::move(links);
        p.indicator.assign(link_count, 0);
        for (int l : p.links) {
            p.indicator[static_cast<std::size_t>(l)] = 1;
        }
        return p;
    };

    for (std::size_t s = 0; s < n; ++s) {
        const int si = static_cast<int>(s);
        std::vector<std::vector<std::pair<std::vector<int>, std::vector<int>>>> found(n);
        std::vector<int> nodes{si};
        std::vector<int> links;
        std::vector<char> on_path(n, 0);
        on_path[s] = 1;
        extend(adj, max_hops, nodes, links, on_path, found);

        out.paths_[s * n + s].push_back(make(si, si, {si}, {network.intra_link(si)}));
        for (std::size_t t = 0; t < n; ++t) {
            if (t == s) {
                continue;
            }
            auto& cand = found[t];
            if (cand.empty()) {
                throw DisconnectedGraph(si, static_cast<int>(t), max_hops);
            }
            std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
                if (a.first.size() != b.first.size()) {
                    return a.first.size() < b.first.size();
                }
                return a.first < b.first;
            });
            auto& list = out.paths_[s * n + t];
            for (auto& [pn, pl] : cand) {
                list.push_back(make(si, static_cast<int>(t), std::move(pn), std::move(pl)));
                list.back().ordinal = static_cast<int>(list.size()) - 1;
            }
        }
    }
    return out;
}

double path_delay(const PhysicalPath& path, const PhysicalNetwork& network)
{
    double d = 0.0;
    for (int l : path.links) {
        d += network.links().at(static_cast<std::size_t>(l)).delay;
    }
    return d;
}

PhysicalNetwork generate_random_topology(int node_count, std::uint64_t seed,
                                         const TopologyParams& params)
{
    if (node_count < 1) {
        throw TopologyError("node_count must be at least 1");
    }
    const auto n = static_cast<std::size_t>(node_count);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution edge(params.edge_probability);

    std::vector<std::pair<int, int>> edges;
    for (int attempt = 0;; ++attempt) {
        if (attempt == 10000) {
            throw TopologyError("could not draw a connected graph; raise edge_probability");
        }
        edges.clear();
        for (int u = 0; u < node_count; ++u) {
            for (int v = u + 1; v < node_count; ++v) {
                if (edge(rng)) {
                    edges.emplace_back(u, v);
                }
            }
        }
        // union-find connectivity check
        std::vector<int> parent(n);
        for (std::size_t i = 0; i < n; ++i) {
            parent[i] = static_cast<int>(i);
        }
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                x = parent[static_cast<std::size_t>(x)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            }
            return x;
        };
        std::size_t components = n;
        for (auto [u, v] : edges) {
            const int a = find(u);
            const int b = find(v);
            if (a != b) {
                parent[static_cast<std::size_t>(a)] = b;
                --components;
            }
        }
        if (components == 1) {
            break;
        }
    }

    std::uniform_real_distribution<double> bw(params.inter_bandwidth.lo, params.inter_bandwidth.hi);
    std::uniform_real_distribution<double> delay(params.inter_delay.lo, params.inter_delay.hi);
    std::uniform_real_distribution<double> factor(params.inter_cost_factor.lo,
                                                  params.inter_cost_factor.hi);

    std::vector<CloudNode> nodes;
    for (int i = 0; i < node_count; ++i) {
        nodes.push_back({i, params.capacity, params.power_idle, params.power_max});
    }
    std::vector<PhysicalLink> links;
    for (auto [u, v] : edges) {
        PhysicalLink l;
        l.u = u;
        l.v = v;
        l.kind = LinkKind::inter;
        l.bandwidth = bw(rng);
        l.delay = delay(rng);
        const double u_cost = factor(rng);
        l.unit_cost = params.inter_unit_cost_override >= 0 ? params.inter_unit_cost_override
                                                           : u_cost * l.bandwidth;
        links.push_back(l);
    }
    for (int i = 0; i < node_count; ++i) {
        links.push_back({i, i, params.intra_bandwidth, params.intra_delay, params.intra_unit_cost,
                         LinkKind::intra});
    }
    return enumerate_paths(PhysicalNetwork(std::move(nodes), std::move(links)), params.max_hops);
}

PhysicalNetwork load_topology_json(std::istream& in)
{
    json j;
    try {
        in >> j;
        const TopologyParams defaults;
        std::vector<CloudNode> nodes;
        for (const auto& jn : j.at("nodes")) {
            CloudNode node;
            node.id = jn.at("id").get<int>();
            node.capacity.compute = jn.value("com_mhz", defaults.capacity.compute);
            node.capacity.memory = jn.value("mem_gb", defaults.capacity.memory);
            node.capacity.storage = jn.value("sto_gb", defaults.capacity.storage);
            node.power_idle = jn.value("p_idle_w", defaults.power_idle);
            node.power_max = jn.value("p_max_w", defaults.power_max);
            nodes.push_back(node);
        }
        std::sort(nodes.begin(), nodes.end(),
                  [](const CloudNode& a, const CloudNode& b) { return a.id < b.id; });
        std::vector<PhysicalLink> links;
        std::vector<char> has_intra(nodes.size(), 0);
        for (const auto& jl : j.at("links")) {
            PhysicalLink l;
            l.u = jl.at("u").get<int>();
            l.v = jl.at("v").get<int>();
            l.kind = l.u == l.v ? LinkKind::intra : LinkKind::inter;
            l.bandwidth = jl.at("bw_kbps").get<double>();
            l.delay = jl.at("delay_ms").get<double>();
            l.unit_cost = jl.at("psi").get<double>();
            if (l.kind == LinkKind::intra && l.u >= 0
                && static_cast<std::size_t>(l.u) < has_intra.size()) {
                has_intra[static_cast<std::size_t>(l.u)] = 1;
            }
            links.push_back(l);
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!has_intra[i]) {
                const int id = static_cast<int>(i);
                links.push_back({id, id, defaults.intra_bandwidth, defaults.intra_delay,
                                 defaults.intra_unit_cost, LinkKind::intra});
            }
        }
        const int max_hops = j.value("max_hops", defaults.max_hops);
        return enumerate_paths(PhysicalNetwork(std::move(nodes), std::move(links)), max_hops);
    } catch (const json::exception& e) {
        throw TopologyError(std::string("topology JSON: ") + e.what());
    }
}

void write_topology_json(const PhysicalNetwork& network, std::ostream& out)
{
    json j;
    j["nodes"] = json::array();
    for (const auto& n : network.nodes()) {
        j["nodes"].push_back({{"id", n.id},
                              {"com_mhz", n.capacity.compute},
                              {"mem_gb", n.capacity.memory},
                              {"sto_gb", n.capacity.storage},
                              {"p_idle_w", n.power_idle},
                              {"p_max_w", n.power_max}});
    }
    j["links"] = json::array();
    for (const auto& l : network.links()) {
        j["links"].push_back({{"u", l.u},
                              {"v", l.v},
                              {"bw_kbps", l.bandwidth},
                              {"delay_ms", l.delay},
                              {"psi", l.unit_cost}});
    }
    j["max_hops"] = network.max_hops();
    out << j.dump(2) << '\n';
}

} // namespace slicenet
