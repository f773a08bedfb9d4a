#include "slicenet/admission.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace slicenet {

using milp::MilpModel;
using milp::VarKind;

namespace {

// A slack counts as nonzero above this fraction of the row's right-hand side.
constexpr double kSlackRelTol = 1e-6;

double slack_tol(double rhs)
{
    return kSlackRelTol * std::max(1.0, std::abs(rhs));
}

// Raises every slack variable to the overflow of the rows it relaxes.
void settle_slacks(const MilpModel& model, std::vector<double>& x)
{
    const auto& vars = model.variables();
    for (const auto& row : model.constraints()) {
        int slack = -1;
        double lhs = 0.0;
        for (const auto& t : row.terms) {
            if (vars[static_cast<std::size_t>(t.var)].kind == VarKind::continuous && t.coef == -1.0) {
                slack = t.var;
            } else {
                lhs += t.coef * x[static_cast<std::size_t>(t.var)];
            }
        }
        if (slack >= 0) {
            auto& s = x[static_cast<std::size_t>(slack)];
            s = std::max(s, lhs - row.rhs);
        }
    }
}

double slice_max_delay(const SliceRequest& s)
{
    double d = 0.0;
    for (const auto& vl : s.vls) {
        d = std::max(d, vl.max_delay);
    }
    return d;
}

struct Culprit {
    RejectReason reason;
    std::size_t slice;
};

// Category order of the rejection rule: compute, memory, storage, then bandwidth, then
// delay. Argmax ties go to the lowest (tenant, slice).
std::optional<Culprit> pick_culprit(const ElasticReport& r, const PhysicalNetwork& network,
                                    const RequestBatch& batch)
{
    auto argmax = [&](auto score) {
        std::size_t best = 0;
        for (std::size_t s = 1; s < batch.slices.size(); ++s) {
            const double a = score(s);
            const double b = score(best);
            if (a > b || (a == b && batch.slices[s].id < batch.slices[best].id)) {
                best = s;
            }
        }
        return best;
    };

    static constexpr RejectReason kNodeReasons[] = {RejectReason::compute, RejectReason::memory,
                                                    RejectReason::storage};
    for (std::size_t k = 0; k < kResources.size(); ++k) {
        const Resource res = kResources[k];
        bool over = false;
        for (std::size_t n = 0; n < r.sigma_vm.size(); ++n) {
            over = over || r.sigma_vm[n][k] > slack_tol(network.nodes()[n].capacity[res]);
        }
        if (over) {
            return Culprit{kNodeReasons[k], argmax([&](std::size_t s) {
                               return total_demand(batch.slices[s], res);
                           })};
        }
    }
    for (std::size_t l = 0; l < r.sigma_bw.size(); ++l) {
        if (r.sigma_bw[l] > slack_tol(network.links()[l].bandwidth)) {
            return Culprit{RejectReason::bandwidth,
                           argmax([&](std::size_t s) { return total_rate(batch.slices[s]); })};
        }
    }
    for (std::size_t s = 0; s < r.sigma_tau.size(); ++s) {
        if (r.sigma_tau[s] > slack_tol(slice_max_delay(batch.slices[s]))) {
            return Culprit{RejectReason::delay,
                           argmax([&](std::size_t q) { return r.sigma_tau[q]; })};
        }
    }
    return std::nullopt;
}

AdmissionOutcome run_loop(const PhysicalNetwork& network, const RequestBatch& batch,
                          ElasticBase base, const Placement* fixed,
                          const milp::SolverConfig& solver)
{
    AdmissionOutcome out;
    RequestBatch current = batch;
    for (;;) {
        std::optional<Placement> pinned;
        if (fixed != nullptr) {
            pinned = remap_placement(*fixed, network, batch, current);
        }
        if (current.empty() && !batch.empty()) {
            // everything rejected; nothing left to certify
            out.witness = pinned ? *pinned : empty_placement(network, current);
            break;
        }
        ++out.rounds;
        const Formulation f =
            build_elastic_model(network, current, base, pinned ? &*pinned : nullptr);

        milp::SolverConfig config = solver;
        config.options.branch_priority = branch_priority(f);
        // start from the cheaper of the split and unsplit packings
        std::vector<Placement> starts;
        if (pinned) {
            starts.push_back(*pinned);
        } else {
            starts.push_back(greedy_placement(network, current, true));
            starts.push_back(greedy_placement(network, current, false));
        }
        double best = milp::kInfinity;
        for (auto& start : starts) {
            greedy_routes(start, network, current);
            bool placed = true;
            for (std::size_t v = 0; v < start.xi.size(); ++v) {
                placed = placed && start.host(static_cast<int>(v)) >= 0;
            }
            if (!placed) {
                continue;
            }
            std::vector<double> x = encode_placement(f, start);
            settle_slacks(f.model, x);
            const double z = f.model.evaluate_objective(x);
            if (z < best) {
                best = z;
                config.options.initial_solution = std::move(x);
            }
        }
        const milp::MilpSolution sol = milp::solve(f.model, config);

        AdmissionRound round;
        round.round = out.rounds;
        round.offered = current.size();
        round.status = sol.status;
        round.total_slack = sol.has_incumbent ? sol.objective_value : milp::kInfinity;
        round.bound = sol.best_bound;
        out.history.push_back(round);
        if (sol.status == milp::SolveStatus::time_limit) {
            out.limited = true;
        }

        if (!sol.has_incumbent) {
            for (const auto& s : current.slices) {
                out.rejected.push_back({s.id, RejectReason::unroutable, out.rounds});
            }
            current = RequestBatch{};
            out.witness = empty_placement(network, current);
            if (pinned) {
                out.witness->gamma = pinned->gamma;
            }
            break;
        }
        const ElasticReport report = read_slacks(f, sol.assignment);
        const auto culprit = pick_culprit(report, network, current);
        if (!culprit) {
            Placement w = decode_placement(f, sol, network, current);
            if (pinned) {
                w.xi = pinned->xi;
                w.gamma = pinned->gamma;
            }
            out.witness = std::move(w);
            break;
        }
        const SliceId id = current.slices[culprit->slice].id;
        out.rejected.push_back({id, culprit->reason, out.rounds});
        current = current.without({id});
    }
    out.accepted = std::move(current);
    return out;
}

} // namespace

const char* to_string(ElasticBase base)
{
    switch (base) {
    case ElasticBase::joint:
        return "joint";
    case ElasticBase::nodes_only:
        return "nodes-only";
    case ElasticBase::links_only:
        return "links-only";
    }
    return "?";
}

const char* to_string(RejectReason reason)
{
    switch (reason) {
    case RejectReason::compute:
        return "compute";
    case RejectReason::memory:
        return "memory";
    case RejectReason::storage:
        return "storage";
    case RejectReason::bandwidth:
        return "bandwidth";
    case RejectReason::delay:
        return "delay";
    case RejectReason::unroutable:
        return "unroutable";
    }
    return "?";
}

Formulation build_elastic_model(const PhysicalNetwork& network, const RequestBatch& batch,
                                ElasticBase base, const Placement* fixed)
{
    FormulationOptions o;
    o.objective = Objective::slack;
    switch (base) {
    case ElasticBase::joint:
        o.elastic_nodes = true;
        o.elastic_links = true;
        break;
    case ElasticBase::nodes_only:
        o.link_part = false;
        o.elastic_nodes = true;
        break;
    case ElasticBase::links_only:
        if (fixed == nullptr) {
            throw std::invalid_argument("links-only elastic model needs a fixed placement");
        }
        o.node_part = false;
        o.elastic_links = true;
        o.fixed = fixed;
        break;
    }
    return build_formulation(network, batch, CostWeights{}, o);
}

ElasticReport read_slacks(const Formulation& f, const std::vector<double>& values)
{
    auto get = [&](int var) {
        return var >= 0 ? std::max(0.0, values.at(static_cast<std::size_t>(var))) : 0.0;
    };
    ElasticReport r;
    r.sigma_vm.resize(f.vars.sigma_vm.size());
    for (std::size_t n = 0; n < f.vars.sigma_vm.size(); ++n) {
        for (std::size_t k = 0; k < kResources.size(); ++k) {
            r.sigma_vm[n][k] = get(f.vars.sigma_vm[n][k]);
            r.total += r.sigma_vm[n][k];
        }
    }
    for (int v : f.vars.sigma_bw) {
        r.sigma_bw.push_back(get(v));
        r.total += r.sigma_bw.back();
    }
    for (int v : f.vars.sigma_tau) {
        r.sigma_tau.push_back(get(v));
        r.total += r.sigma_tau.back();
    }
    return r;
}

AdmissionOutcome run_ac_jra(const PhysicalNetwork& network, const RequestBatch& batch,
                            const milp::SolverConfig& solver)
{
    return run_loop(network, batch, ElasticBase::joint, nullptr, solver);
}

AdmissionOutcome run_ac_dma(const PhysicalNetwork& network, const RequestBatch& batch,
                            const milp::SolverConfig& solver)
{
    return run_loop(network, batch, ElasticBase::nodes_only, nullptr, solver);
}

AdmissionOutcome run_ac_dla(const PhysicalNetwork& network, const RequestBatch& batch,
                            const Placement& placement, const milp::SolverConfig& solver)
{
    if (placement.xi.size() != batch.vm_count()) {
        throw std::invalid_argument("placement does not match the batch");
    }
    return run_loop(network, batch, ElasticBase::links_only, &placement, solver);
}

void write_admission_json(const AdmissionOutcome& outcome, std::ostream& out)
{
    using nlohmann::json;
    json j;
    j["accepted"] = json::array();
    for (const auto& s : outcome.accepted.slices) {
        j["accepted"].push_back({{"tenant", s.id.tenant}, {"slice", s.id.slice}});
    }
    j["rejected"] = json::array();
    for (const auto& r : outcome.rejected) {
        j["rejected"].push_back({{"tenant", r.id.tenant},
                                 {"slice", r.id.slice},
                                 {"reason", to_string(r.reason)},
                                 {"round", r.round}});
    }
    j["rounds"] = outcome.rounds;
    j["limited"] = outcome.limited;
    j["history"] = json::array();
    for (const auto& h : outcome.history) {
        json jh{{"round", h.round},
                {"offered", h.offered},
                {"status", milp::to_string(h.status)}};
        jh["total_slack"] = std::isfinite(h.total_slack) ? json(h.total_slack) : json(nullptr);
        jh["bound"] = std::isfinite(h.bound) ? json(h.bound) : json(nullptr);
        j["history"].push_back(std::move(jh));
    }
    out << j.dump(2) << '\n';
}

} // namespace slicenet
