#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicenet {

enum class Resource { compute = 0, memory = 1, storage = 2 };

inline constexpr std::array<Resource, 3> kResources{Resource::compute, Resource::memory,
                                                    Resource::storage};

const char* to_string(Resource r);

/// compute in MHz, memory and storage in GB.
struct ResourceVector {
    double compute = 0.0;
    double memory = 0.0;
    double storage = 0.0;

    double operator[](Resource r) const
    {
        switch (r) {
        case Resource::compute:
            return compute;
        case Resource::memory:
            return memory;
        case Resource::storage:
            return storage;
        }
        return 0.0;
    }
    double& operator[](Resource r)
    {
        switch (r) {
        case Resource::memory:
            return memory;
        case Resource::storage:
            return storage;
        default:
            return compute;
        }
    }
};

struct CloudNode {
    int id = 0;
    ResourceVector capacity;
    double power_idle = 0.0;  // W
    double power_max = 0.0;   // W
};

enum class LinkKind { intra, inter };

/// Undirected physical link. An intra link joins a node to itself and
/// carries traffic between VMs hosted on the same node.
struct PhysicalLink {
    int u = 0;
    int v = 0;
    double bandwidth = 0.0;  // Kbps
    double delay = 0.0;      // ms
    double unit_cost = 0.0;  // per Kbps
    LinkKind kind = LinkKind::inter;
};

struct PhysicalPath {
    int source = 0;
    int target = 0;
    int ordinal = 0;                    // b, 0-based within (source, target)
    std::vector<int> nodes;             // visited nodes, source first
    std::vector<int> links;             // link ids in traversal order
    std::vector<std::uint8_t> indicator;  // per link id: 1 iff the link is on the path

    bool uses(int link) const { return indicator.at(static_cast<std::size_t>(link)) != 0; }
};

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DisconnectedGraph : public TopologyError {
public:
    DisconnectedGraph(int source, int target, int max_hops);
    int source;
    int target;
};

class PhysicalNetwork {
public:
    PhysicalNetwork() = default;

    /// Checks node and link invariants; paths are left empty.
    PhysicalNetwork(std::vector<CloudNode> nodes, std::vector<PhysicalLink> links);

    const std::vector<CloudNode>& nodes() const { return nodes_; }
    const std::vector<PhysicalLink>& links() const { return links_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }

    bool has_paths() const { return !paths_.empty(); }
    int max_hops() const { return max_hops_; }

    /// Candidate paths B_{n,n'}; for n == n' the single intra path.
    const std::vector<PhysicalPath>& paths(int source, int target) const;

    /// Id of node n's intra link.
    int intra_link(int node) const;

    /// Copy with every link's unit cost replaced; paths are kept.
    PhysicalNetwork with_unit_costs(const std::vector<double>& costs) const;

private:
    friend PhysicalNetwork enumerate_paths(const PhysicalNetwork& network, int max_hops);

    std::vector<CloudNode> nodes_;
    std::vector<PhysicalLink> links_;
    std::vector<int> intra_;
    std::vector<std::vector<PhysicalPath>> paths_;  // index source * N + target
    int max_hops_ = 0;
};

/// All simple paths of at most `max_hops` inter links between every ordered
/// pair of distinct nodes, plus each node's intra self-path. Paths for a pair
/// are ordered by hop count, then by visited node sequence.
///
/// Throws DisconnectedGraph when some pair has no path within max_hops.
PhysicalNetwork enumerate_paths(const PhysicalNetwork& network, int max_hops);

double path_delay(const PhysicalPath& path, const PhysicalNetwork& network);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct TopologyParams {
    double edge_probability = 0.6;
    ResourceVector capacity{7000.0, 800.0, 2000.0};
    double power_idle = 100.0;
    double power_max = 200.0;
    Range inter_bandwidth{9e4, 1.9e5};
    Range inter_delay{0.1, 4.0};
    /// Inter unit cost is u * bandwidth with u drawn from this range.
    Range inter_cost_factor{1e-3, 1e-2};
    /// When >= 0, every inter link gets this unit cost instead.
    double inter_unit_cost_override = -1.0;
    double intra_bandwidth = 1e7;
    double intra_delay = 0.0;
    double intra_unit_cost = 1.0;
    int max_hops = 4;
};

/// Erdos-Renyi graph redrawn until connected, intra links appended after the
/// inter links, then paths enumerated.
PhysicalNetwork generate_random_topology(int node_count, std::uint64_t seed,
                                         const TopologyParams& params = {});

/// {nodes:[{id, com_mhz, mem_gb, sto_gb, p_idle_w, p_max_w}],
///  links:[{u, v, bw_kbps, delay_ms, psi}], max_hops}
/// Nodes without an intra link (u == v) get one with the default intra values.
PhysicalNetwork load_topology_json(std::istream& in);
void write_topology_json(const PhysicalNetwork& network, std::ostream& out);

} // namespace slicenet
