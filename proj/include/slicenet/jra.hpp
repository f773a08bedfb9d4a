#pragma once

#include "slicenet/milp/solver.hpp"
#include "slicenet/slices.hpp"
#include "slicenet/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicenet {

struct CostWeights {
    double zeta = 9e-5;    // per bandwidth-cost unit
    double upsilon = 1.0;  // per watt
};

/// Every candidate path of the network in a fixed order: pairs (n, n') in
/// row-major order, intra path included, ordinals ascending within a pair.
/// Placement::pi is indexed by position in this list.
std::vector<const PhysicalPath*> path_catalog(const PhysicalNetwork& network);

/// Flat view of a batch: VMs and VLs numbered in batch order.
struct BatchIndex {
    struct Vm {
        int slice = 0;  // position in batch.slices
        int vm = 0;     // index within the slice
    };
    struct Vl {
        int slice = 0;
        int vl = 0;
        int a = 0;  // flat VM indices of the endpoints
        int b = 0;
    };
    std::vector<Vm> vms;
    std::vector<Vl> vls;
    std::vector<int> first_vm;  // per slice, flat index of its VM 0

    explicit BatchIndex(const RequestBatch& batch);
};

/// Decoded decision variables, relative to one batch and network.
struct Placement {
    std::vector<std::vector<std::uint8_t>> xi;     // [vm][node]
    std::vector<std::uint8_t> gamma;               // [node]
    std::vector<std::vector<std::uint8_t>> pi;     // [vl][catalog path]
    std::vector<std::vector<std::uint8_t>> theta;  // [vl][n * N + n']

    /// Hosting node of a flat VM index, or -1 when unplaced.
    int host(int vm) const;
    /// Catalog position of the chosen path of a VL, or -1 when unrouted.
    int route(int vl) const;
};

Placement empty_placement(const PhysicalNetwork& network, const RequestBatch& batch);

struct CostReport {
    double total = 0.0;
    double beta = 0.0;
    std::vector<double> node_power;   // W
    double power = 0.0;               // W
    std::vector<double> utilization;  // compute fraction per node
};

class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string tag, const std::string& detail);
    const std::string& tag() const { return tag_; }

private:
    std::string tag_;
};

enum class Objective {
    cost,   // zeta * beta + upsilon * sum of node power
    power,  // upsilon * sum of node power
    slack,  // sum of elastic variables
};

/// Which rows and variables a formulation carries.
///
/// The node part holds xi, gamma and C1-C3; the link part holds pi, theta and
/// C4-C7 with C5 replaced by its linearization C5-a..d. Elastic flags turn
/// C1 into C1-a and C6/C7 into C6-a/C7-a. With `fixed` set, xi and gamma are
/// pinned to that placement and the node rows are left out.
struct FormulationOptions {
    bool node_part = true;
    bool link_part = true;
    bool elastic_nodes = false;
    bool elastic_links = false;
    Objective objective = Objective::cost;
    const Placement* fixed = nullptr;
};

/// Variable ids of a built formulation; -1 marks an absent variable.
struct VariableIndex {
    std::vector<int> gamma;                   // [node]
    std::vector<std::vector<int>> xi;         // [vm][node]
    std::vector<std::vector<int>> pi;         // [vl][catalog path]
    std::vector<std::vector<int>> theta;      // [vl][n * N + n']
    std::vector<std::vector<int>> sigma_vm;   // [node][resource]
    std::vector<int> sigma_bw;                // [link]
    std::vector<int> sigma_tau;               // [slice]
};

struct Formulation {
    milp::MilpModel model;
    VariableIndex vars;
    bool node_part = true;
    bool link_part = true;
    Objective objective = Objective::cost;
};

Formulation build_formulation(const PhysicalNetwork& network, const RequestBatch& batch,
                              const CostWeights& weights, const FormulationOptions& options);

/// Branching order for the solver: gamma first, then xi, then the rest.
std::vector<int> branch_priority(const Formulation& f);

/// Joint problem: C1-C4, C5-a..d, C6, C7, binaries; objective C_Total.
Formulation build_jra_model(const PhysicalNetwork& network, const RequestBatch& batch,
                            const CostWeights& weights = {});

/// (P_max - P_idle) * U + on * P_idle
double node_power(const CloudNode& node, double utilization, bool on);

double bandwidth_cost(const Placement& placement, const PhysicalNetwork& network,
                      const RequestBatch& batch);

/// Cost model evaluated directly on a placement; VMs without a host and VLs
/// without a route contribute nothing.
CostReport evaluate_cost(const Placement& placement, const PhysicalNetwork& network,
                         const RequestBatch& batch, const CostWeights& weights);

/// Reads binaries back into a Placement without checking anything.
Placement decode_placement(const Formulation& f, const milp::MilpSolution& solution,
                           const PhysicalNetwork& network, const RequestBatch& batch);

/// Which constraint families verify_placement checks.
struct VerifyScope {
    bool nodes = true;  // C1, C2, C3
    bool links = true;  // C4, C5, C6, C7
};

/// Re-derives every placement invariant from the raw values; throws
/// InvariantViolation naming the constraint family ("C2", "C5-b", ...).
void verify_placement(const Placement& placement, const PhysicalNetwork& network,
                      const RequestBatch& batch, const VerifyScope& scope = {});

/// Decodes an optimal (or limit-stopped) joint solution, re-verifies it and
/// re-computes the cost independently of the model. Throws InvariantViolation
/// when a check fails or when the recomputed total disagrees with the
/// solver objective by more than 1e-6.
std::pair<Placement, CostReport> decode_and_cost(const Formulation& f,
                                                 const milp::MilpSolution& solution,
                                                 const PhysicalNetwork& network,
                                                 const RequestBatch& batch,
                                                 const CostWeights& weights = {});

/// Assignment vector for `f` holding the placement's binaries; every
/// continuous variable is 0.
std::vector<double> encode_placement(const Formulation& f, const Placement& placement);

/// Re-indexes a placement from one batch to another by slice id. Slices
/// missing from `from` come out unplaced and unrouted; gamma is copied.
Placement remap_placement(const Placement& placement, const PhysicalNetwork& network,
                          const RequestBatch& from, const RequestBatch& to);

/// Switches off every node that hosts no VM.
void switch_off_idle(Placement& placement);

/// Gives every unrouted VL with both endpoints placed the first catalog path
/// between its hosts and sets theta to match.
void route_first_paths(Placement& placement, const PhysicalNetwork& network,
                       const RequestBatch& batch);

/// Constructive placement used to seed the solver. Slices go in order of
/// descending total rate, whole onto one node when one has room, otherwise
/// VM by VM onto the roomiest node; VLs are then routed by greedy_routes.
/// Nodes and links may end up overfilled when nothing fits. With `split`
/// off a slice that fits on no node overfills the roomiest one whole.
Placement greedy_placement(const PhysicalNetwork& network, const RequestBatch& batch,
                           bool split = true);

/// Routes every unrouted VL whose endpoints are placed, heaviest first, on
/// the path that meets its delay bound with the least bandwidth overflow
/// (then cheapest, then lowest catalog position).
void greedy_routes(Placement& placement, const PhysicalNetwork& network,
                   const RequestBatch& batch);

void write_placement_json(const Placement& placement, const CostReport& cost,
                          const PhysicalNetwork& network, const RequestBatch& batch,
                          std::ostream& out);

} // namespace slicenet
