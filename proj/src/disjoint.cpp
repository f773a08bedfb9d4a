#include "slicenet/disjoint.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace slicenet {

namespace {

// Permutes interchangeable nodes so that used ones come first, ordered by
// the lowest VM they host.
void canonicalize_nodes(Placement& p, const PhysicalNetwork& network)
{
    const std::size_t N = network.node_count();
    auto key = [&](std::size_t n) {
        const auto& node = network.nodes()[n];
        return std::make_tuple(node.capacity.compute, node.capacity.memory, node.capacity.storage,
                               node.power_idle, node.power_max);
    };
    auto first_vm = [&](std::size_t n) {
        for (std::size_t v = 0; v < p.xi.size(); ++v) {
            if (p.xi[v][n]) {
                return v;
            }
        }
        return p.xi.size();
    };
    std::map<decltype(key(0)), std::vector<std::size_t>> groups;
    for (std::size_t n = 0; n < N; ++n) {
        groups[key(n)].push_back(n);
    }
    std::vector<std::size_t> source(N);  // new column n takes old column source[n]
    for (const auto& [k, members] : groups) {
        std::vector<std::size_t> by_use = members;
        std::stable_sort(by_use.begin(), by_use.end(), [&](std::size_t a, std::size_t b) {
            return std::make_pair(p.gamma[a] == 0, first_vm(a))
                < std::make_pair(p.gamma[b] == 0, first_vm(b));
        });
        for (std::size_t i = 0; i < members.size(); ++i) {
            source[members[i]] = by_use[i];
        }
    }
    Placement q = p;
    for (std::size_t n = 0; n < N; ++n) {
        q.gamma[n] = p.gamma[source[n]];
        for (std::size_t v = 0; v < p.xi.size(); ++v) {
            q.xi[v][n] = p.xi[v][source[n]];
        }
    }
    p = std::move(q);
}

nlohmann::json placement_json(const Placement& placement, const CostReport& cost,
                              const PhysicalNetwork& network, const RequestBatch& batch)
{
    std::stringstream ss;
    write_placement_json(placement, cost, network, batch, ss);
    return nlohmann::json::parse(ss);
}

nlohmann::json admission_json(const AdmissionOutcome& outcome)
{
    std::stringstream ss;
    write_admission_json(outcome, ss);
    return nlohmann::json::parse(ss);
}

} // namespace

NodeStageResult run_dma(const PhysicalNetwork& network, const RequestBatch& batch,
                        const CostWeights& weights, const milp::SolverConfig& solver)
{
    FormulationOptions o;
    o.link_part = false;
    o.objective = Objective::power;
    const Formulation f = build_formulation(network, batch, weights, o);

    milp::SolverConfig config = solver;
    config.options.branch_priority = branch_priority(f);
    config.options.initial_solution = encode_placement(f, greedy_placement(network, batch));
    const milp::MilpSolution sol = milp::solve(f.model, config);
    if (!sol.has_incumbent) {
        throw InfeasibleAfterAdmission("node stage has no feasible packing for "
                                       + std::to_string(batch.size()) + " admitted slices");
    }
    auto [placement, cost] = decode_and_cost(f, sol, network, batch, weights);
    canonicalize_nodes(placement, network);
    NodeStageResult r;
    r.power = evaluate_cost(placement, network, batch, weights).power;
    r.placement = std::move(placement);
    r.status = sol.status;
    return r;
}

LinkStageResult run_dla(const PhysicalNetwork& network, const Placement& placement,
                        const RequestBatch& batch, const CostWeights& weights,
                        const milp::SolverConfig& solver, const Placement* start)
{
    FormulationOptions o;
    o.node_part = false;
    o.fixed = &placement;
    const Formulation f = build_formulation(network, batch, weights, o);

    milp::SolverConfig config = solver;
    Placement seed = start != nullptr ? *start : placement;
    seed.xi = placement.xi;
    seed.gamma = placement.gamma;
    greedy_routes(seed, network, batch);
    config.options.initial_solution = encode_placement(f, seed);
    const milp::MilpSolution sol = milp::solve(f.model, config);
    if (!sol.has_incumbent) {
        throw InfeasibleAfterAdmission("link stage has no feasible routing for "
                                       + std::to_string(batch.size()) + " admitted slices");
    }
    auto [routed, cost] = decode_and_cost(f, sol, network, batch, weights);
    return {std::move(routed), std::move(cost), sol.status};
}

DisjointResult run_dra_pipeline(const PhysicalNetwork& network, const RequestBatch& batch,
                                const CostWeights& weights, const milp::SolverConfig& solver)
{
    DisjointResult r;
    r.node_admission = run_ac_dma(network, batch, solver);
    const RequestBatch& admitted = r.node_admission.accepted;
    r.node_stage = run_dma(network, admitted, weights, solver);
    r.power = r.node_stage.power;

    const Placement frozen = remap_placement(r.node_stage.placement, network, admitted, batch);
    r.link_admission = run_ac_dla(network, batch, frozen, solver);
    r.accepted = r.link_admission.accepted;
    r.collapse_flag = !batch.empty() && r.accepted.empty();

    const Placement on_accepted = remap_placement(frozen, network, batch, r.accepted);
    if (!r.accepted.empty()) {
        const Placement* start =
            r.link_admission.witness ? &*r.link_admission.witness : nullptr;
        r.link_stage = run_dla(network, on_accepted, r.accepted, weights, solver, start);
        r.beta = r.link_stage.cost.beta;
        r.joint_point = r.link_stage.placement;
    } else {
        r.link_stage.placement = on_accepted;
        r.link_stage.cost = evaluate_cost(on_accepted, network, r.accepted, weights);
        r.joint_point = on_accepted;
    }
    switch_off_idle(r.joint_point);
    r.combined_cost = weights.upsilon * r.power + weights.zeta * r.beta;
    r.limited = r.node_admission.limited || r.link_admission.limited
        || r.node_stage.status == milp::SolveStatus::time_limit
        || r.link_stage.status == milp::SolveStatus::time_limit;
    return r;
}

void write_disjoint_json(const DisjointResult& result, const PhysicalNetwork& network,
                         const RequestBatch& batch, std::ostream& out)
{
    using nlohmann::json;
    const RequestBatch& admitted = result.node_admission.accepted;
    CostReport node_cost =
        evaluate_cost(result.node_stage.placement, network, admitted, CostWeights{0.0, 1.0});

    json node{{"stage", "node"},
              {"admission", admission_json(result.node_admission)},
              {"placement", placement_json(result.node_stage.placement, node_cost, network,
                                           admitted)},
              {"power_w", result.power},
              {"status", milp::to_string(result.node_stage.status)}};
    json link{{"stage", "link"},
              {"admission", admission_json(result.link_admission)},
              {"placement", placement_json(result.link_stage.placement, result.link_stage.cost,
                                           network, result.accepted)},
              {"beta", result.beta},
              {"status", milp::to_string(result.link_stage.status)}};
    json j{{"stages", json::array({node, link})},
           {"offered", batch.size()},
           {"accepted", result.accepted.size()},
           {"combined_cost", result.combined_cost},
           {"collapse", result.collapse_flag},
           {"limited", result.limited}};
    out << j.dump(2) << '\n';
}

} // namespace slicenet
