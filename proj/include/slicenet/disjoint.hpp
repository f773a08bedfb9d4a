#pragma once

#include "slicenet/admission.hpp"

#include <iosfwd>
#include <stdexcept>

namespace slicenet {

/// A stage found no solution on a set its admission control let through.
class InfeasibleAfterAdmission : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeStageResult {
    Placement placement;  // xi and gamma only, indexed by the batch it was given
    double power = 0.0;   // W
    milp::SolveStatus status = milp::SolveStatus::optimal;
};

struct LinkStageResult {
    Placement placement;  // fixed xi/gamma plus the chosen routes
    CostReport cost;
    milp::SolveStatus status = milp::SolveStatus::optimal;
};

/// Node-only packing minimizing power. Interchangeable nodes (same capacity
/// and power figures) are relabelled so that the used ones carry the lowest
/// indices, in order of the first VM they host.
NodeStageResult run_dma(const PhysicalNetwork& network, const RequestBatch& batch,
                        const CostWeights& weights = {}, const milp::SolverConfig& solver = {});

/// Routing on a fixed placement (indexed by `batch`), minimizing the total
/// cost. `start`, when given, seeds the solver.
LinkStageResult run_dla(const PhysicalNetwork& network, const Placement& placement,
                        const RequestBatch& batch, const CostWeights& weights = {},
                        const milp::SolverConfig& solver = {}, const Placement* start = nullptr);

struct DisjointResult {
    AdmissionOutcome node_admission;  // on the offered batch
    NodeStageResult node_stage;       // on node_admission.accepted
    AdmissionOutcome link_admission;  // on the offered batch, placement fixed
    LinkStageResult link_stage;       // on the final accepted set
    RequestBatch accepted;            // accepted by both stages
    double power = 0.0;               // node stage power, every placed VM
    double beta = 0.0;                // routed VLs of the accepted set
    double combined_cost = 0.0;
    bool collapse_flag = false;
    bool limited = false;
    /// Node placement restricted to the accepted set with idle nodes off and
    /// the link stage's routes: a feasible point of the joint problem on it.
    Placement joint_point;
};

/// AC-DMA, DMA, AC-DLA, DLA in sequence. AC-DLA sees the whole offered
/// batch with the DMA placement frozen, so slices turned away by AC-DMA are
/// unplaced there and the link stage rejects everything.
DisjointResult run_dra_pipeline(const PhysicalNetwork& network, const RequestBatch& batch,
                                const CostWeights& weights = {},
                                const milp::SolverConfig& solver = {});

void write_disjoint_json(const DisjointResult& result, const PhysicalNetwork& network,
                         const RequestBatch& batch, std::ostream& out);

} // namespace slicenet
