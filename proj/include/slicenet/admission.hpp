#pragma once

#include "slicenet/jra.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace slicenet {

enum class ElasticBase {
    joint,       // AC-JRA: C1-a, C6-a, C7-a over the joint problem
    nodes_only,  // AC-DMA: C1-a with C2, C3
    links_only,  // AC-DLA: C6-a, C7-a with C4, C5 on a fixed placement
};

const char* to_string(ElasticBase base);

/// Elastic form of the chosen base problem; objective is the sum of all
/// slack variables. `fixed` is required for links_only.
Formulation build_elastic_model(const PhysicalNetwork& network, const RequestBatch& batch,
                                ElasticBase base, const Placement* fixed = nullptr);

/// Slack values read back from a solved elastic model.
struct ElasticReport {
    std::vector<std::array<double, 3>> sigma_vm;  // [node][resource]
    std::vector<double> sigma_bw;                 // [link]
    std::vector<double> sigma_tau;                // [slice of the round's batch]
    double total = 0.0;
};

ElasticReport read_slacks(const Formulation& f, const std::vector<double>& values);

/// unroutable: the elastic model itself had no solution (a VL endpoint
/// without a host), so the whole remaining batch was turned away at once.
enum class RejectReason { compute, memory, storage, bandwidth, delay, unroutable };

const char* to_string(RejectReason reason);

struct Rejection {
    SliceId id;
    RejectReason reason = RejectReason::compute;
    int round = 0;
};

struct AdmissionRound {
    int round = 0;
    std::size_t offered = 0;        // slices still in the model
    double total_slack = 0.0;       // incumbent objective
    double bound = 0.0;             // solver lower bound on it
    milp::SolveStatus status = milp::SolveStatus::optimal;
};

struct AdmissionOutcome {
    RequestBatch accepted;
    std::vector<Rejection> rejected;
    int rounds = 0;
    std::vector<AdmissionRound> history;
    /// Some round stopped on a solver limit; its slack was taken from the
    /// incumbent rather than a proven minimum.
    bool limited = false;
    /// Zero-slack placement of the accepted set from the final round (all
    /// slacks 0 makes it a feasible point of the hard problem). For links
    /// only, xi and gamma are the fixed placement.
    std::optional<Placement> witness;
};

/// Rejection loop on the joint elastic model.
AdmissionOutcome run_ac_jra(const PhysicalNetwork& network, const RequestBatch& batch,
                            const milp::SolverConfig& solver = {});

/// Same loop on the nodes-only elastic model.
AdmissionOutcome run_ac_dma(const PhysicalNetwork& network, const RequestBatch& batch,
                            const milp::SolverConfig& solver = {});

/// Same loop on the links-only elastic model with xi and gamma pinned to
/// `placement` (indexed by `batch`).
AdmissionOutcome run_ac_dla(const PhysicalNetwork& network, const RequestBatch& batch,
                            const Placement& placement, const milp::SolverConfig& solver = {});

void write_admission_json(const AdmissionOutcome& outcome, std::ostream& out);

} // namespace slicenet
