#pragma once

// Exhaustive reference solver for tiny instances. It walks every on/off
// pattern, every VM-to-node map and every path choice, and checks capacity,
// bandwidth and delay straight from the network and batch data. Nothing here
// goes through the MILP formulation or the solver.

#include "slicenet/jra.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slicenet::oracle {

enum class Problem {
    joint,  // placement and routing, full cost
    nodes,  // placement only, power cost
    links,  // routing on a given placement, full cost
};

struct Choice {
    std::vector<int> gamma;  // per node, 0/1
    std::vector<int> host;   // per flat VM
    std::vector<const PhysicalPath*> route;  // per flat VL
    double cost = 0.0;
};

struct FixedPlacement {
    std::vector<int> gamma;
    std::vector<int> host;
};

/// Cheapest feasible choice, or nullopt when none exists. For links,
/// `fixed` supplies gamma and hosts. Ties keep the first choice found.
std::optional<Choice> brute_force(const PhysicalNetwork& network, const RequestBatch& batch,
                                  const CostWeights& weights, Problem problem,
                                  const FixedPlacement* fixed = nullptr);

/// Number of candidate points brute_force would visit.
double search_size(const PhysicalNetwork& network, const RequestBatch& batch, Problem problem);

/// Random instance inside the tiny envelope: 1-2 nodes, 1-2 slices of 1-2
/// VMs, tight capacities, bandwidths and delay bounds so that constraints
/// bind often.
struct TinyInstance {
    PhysicalNetwork network;
    RequestBatch batch;
    FixedPlacement placement;  // a random host map for the links problem
    bool placement_fits = false;  // false when no fitting map was drawn
};

TinyInstance random_tiny_instance(std::uint64_t seed, int max_nodes = 2, int max_slices = 2,
                                  int max_vms = 2);

/// Solver against brute force on `instances` tiny instances drawn from
/// seeds first_seed, first_seed + 1, ... for the joint, node and link
/// problems. Also checks theta against the product of the decoded xi.
struct CrossCheck {
    int instances = 0;
    int solves = 0;
    int feasible = 0;  // solves where both sides found a solution
    std::vector<std::string> failures;
};

CrossCheck cross_check(std::uint64_t first_seed, int instances, int max_nodes, int max_slices,
                       int max_vms, const milp::SolverConfig& solver);

} // namespace slicenet::oracle
