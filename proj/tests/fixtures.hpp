#pragma once

// Small hand-built networks and slices for the module tests.

#include "slicenet/topology.hpp"
#include "slicenet/slices.hpp"

#include <utility>
#include <vector>

namespace fixture {

using namespace slicenet;

inline CloudNode node(int id, double com = 7000.0, double mem = 800.0, double sto = 2000.0,
                      double idle = 100.0, double max = 200.0)
{
    return {id, {com, mem, sto}, idle, max};
}

inline PhysicalLink inter(int u, int v, double bw = 1e5, double delay = 1.0, double psi = 500.0)
{
    return {u, v, bw, delay, psi, LinkKind::inter};
}

inline PhysicalLink intra(int n, double bw = 1e7)
{
    return {n, n, bw, 0.0, 1.0, LinkKind::intra};
}

/// n default nodes, every pair joined by an identical inter link.
inline PhysicalNetwork complete(int n, double bw = 1e5, double delay = 1.0, double psi = 500.0,
                                int max_hops = 2)
{
    std::vector<CloudNode> nodes;
    std::vector<PhysicalLink> links;
    for (int i = 0; i < n; ++i) {
        nodes.push_back(node(i));
    }
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            links.push_back(inter(u, v, bw, delay, psi));
        }
    }
    for (int i = 0; i < n; ++i) {
        links.push_back(intra(i));
    }
    return enumerate_paths(PhysicalNetwork(std::move(nodes), std::move(links)), max_hops);
}

/// Slice of `vms` identical VMs fully meshed by identical VLs.
inline SliceRequest slice(int tenant, int vms, double com = 1000.0, double rate = 1e4,
                          double max_delay = 10.0, double mem = 64.0, double sto = 120.0)
{
    SliceRequest s;
    s.id = {tenant, 0};
    for (int m = 0; m < vms; ++m) {
        s.vms.push_back({s.id, m, {com, mem, sto}});
    }
    for (int a = 0; a < vms; ++a) {
        for (int b = a + 1; b < vms; ++b) {
            s.vls.push_back({a, b, rate, max_delay});
        }
    }
    return s;
}

inline RequestBatch batch(std::vector<SliceRequest> slices)
{
    RequestBatch b;
    b.slices = std::move(slices);
    return b;
}

} // namespace fixture
