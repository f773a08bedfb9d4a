#include "slicenet/jra.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace slicenet {

using milp::MilpModel;
using milp::Relation;
using milp::Term;

namespace {

constexpr double kRelTol = 1e-9;
constexpr double kAbsTol = 1e-6;

bool within(double lhs, double rhs)
{
    return lhs <= rhs + kAbsTol + kRelTol * std::abs(rhs);
}

std::string vm_name(const RequestBatch& batch, const BatchIndex& idx, int vm)
{
    const auto& v = idx.vms[static_cast<std::size_t>(vm)];
    return to_string(batch.slices[static_cast<std::size_t>(v.slice)].id) + "."
        + std::to_string(v.vm);
}

std::string vl_name(const RequestBatch& batch, const BatchIndex& idx, int vl)
{
    const auto& e = idx.vls[static_cast<std::size_t>(vl)];
    const auto& s = batch.slices[static_cast<std::size_t>(e.slice)];
    const auto& d = s.vls[static_cast<std::size_t>(e.vl)];
    return to_string(s.id) + "." + std::to_string(d.a) + "-" + std::to_string(d.b);
}

const VlDemand& vl_demand(const RequestBatch& batch, const BatchIndex& idx, int vl)
{
    const auto& e = idx.vls[static_cast<std::size_t>(vl)];
    return batch.slices[static_cast<std::size_t>(e.slice)].vls[static_cast<std::size_t>(e.vl)];
}

const VmDemand& vm_demand(const RequestBatch& batch, const BatchIndex& idx, int vm)
{
    const auto& v = idx.vms[static_cast<std::size_t>(vm)];
    return batch.slices[static_cast<std::size_t>(v.slice)].vms[static_cast<std::size_t>(v.vm)];
}

double path_unit_cost(const PhysicalPath& p, const PhysicalNetwork& network)
{
    double c = 0.0;
    for (int l : p.links) {
        c += network.links()[static_cast<std::size_t>(l)].unit_cost;
    }
    return c;
}

} // namespace

std::vector<const PhysicalPath*> path_catalog(const PhysicalNetwork& network)
{
    std::vector<const PhysicalPath*> out;
    const auto n = static_cast<int>(network.node_count());
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            for (const auto& p : network.paths(s, t)) {
                out.push_back(&p);
            }
        }
    }
    return out;
}

BatchIndex::BatchIndex(const RequestBatch& batch)
{
    for (std::size_t s = 0; s < batch.slices.size(); ++s) {
        const auto& slice = batch.slices[s];
        first_vm.push_back(static_cast<int>(vms.size()));
        for (std::size_t m = 0; m < slice.vms.size(); ++m) {
            vms.push_back({static_cast<int>(s), static_cast<int>(m)});
        }
        for (std::size_t e = 0; e < slice.vls.size(); ++e) {
            const auto& d = slice.vls[e];
            vls.push_back({static_cast<int>(s), static_cast<int>(e), first_vm.back() + d.a,
                           first_vm.back() + d.b});
        }
    }
}

int Placement::host(int vm) const
{
    const auto& row = xi.at(static_cast<std::size_t>(vm));
    for (std::size_t n = 0; n < row.size(); ++n) {
        if (row[n]) {
            return static_cast<int>(n);
        }
    }
    return -1;
}

int Placement::route(int vl) const
{
    const auto& row = pi.at(static_cast<std::size_t>(vl));
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k]) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

Placement empty_placement(const PhysicalNetwork& network, const RequestBatch& batch)
{
    const std::size_t n = network.node_count();
    const std::size_t paths = path_catalog(network).size();
    Placement p;
    p.xi.assign(batch.vm_count(), std::vector<std::uint8_t>(n, 0));
    p.gamma.assign(n, 0);
    p.pi.assign(batch.vl_count(), std::vector<std::uint8_t>(paths, 0));
    p.theta.assign(batch.vl_count(), std::vector<std::uint8_t>(n * n, 0));
    return p;
}

InvariantViolation::InvariantViolation(std::string tag, const std::string& detail)
    : std::runtime_error(tag + ": " + detail), tag_(std::move(tag))
{
}

Formulation build_formulation(const PhysicalNetwork& network, const RequestBatch& batch,
                              const CostWeights& weights, const FormulationOptions& options)
{
    if (!network.has_paths()) {
        throw TopologyError("network paths must be enumerated before building a model");
    }
    if (options.link_part && !options.node_part && options.fixed == nullptr) {
        throw std::invalid_argument("a links-only formulation needs a fixed placement");
    }
    const std::size_t N = network.node_count();
    const auto catalog = path_catalog(network);
    const BatchIndex idx(batch);
    const std::size_t V = idx.vms.size();
    const std::size_t E = idx.vls.size();

    Formulation f;
    f.node_part = options.node_part;
    f.link_part = options.link_part;
    f.objective = options.objective;
    MilpModel& m = f.model;
    VariableIndex& x = f.vars;

    x.gamma.assign(N, -1);
    x.xi.assign(V, std::vector<int>(N, -1));
    x.pi.assign(E, std::vector<int>(catalog.size(), -1));
    x.theta.assign(E, std::vector<int>(N * N, -1));
    x.sigma_vm.assign(N, std::vector<int>(kResources.size(), -1));
    x.sigma_bw.assign(network.link_count(), -1);
    x.sigma_tau.assign(batch.size(), -1);

    for (std::size_t n = 0; n < N; ++n) {
        x.gamma[n] = m.add_binary("gamma_" + std::to_string(n));
    }
    for (std::size_t v = 0; v < V; ++v) {
        for (std::size_t n = 0; n < N; ++n) {
            x.xi[v][n] = m.add_binary("xi_" + vm_name(batch, idx, static_cast<int>(v)) + "_n"
                                      + std::to_string(n));
        }
    }
    if (options.fixed != nullptr) {
        const Placement& p = *options.fixed;
        if (p.xi.size() != V || p.gamma.size() != N) {
            throw std::invalid_argument("fixed placement does not match the batch");
        }
        for (std::size_t n = 0; n < N; ++n) {
            m.fix(x.gamma[n], p.gamma[n]);
        }
        for (std::size_t v = 0; v < V; ++v) {
            for (std::size_t n = 0; n < N; ++n) {
                m.fix(x.xi[v][n], p.xi[v][n]);
            }
        }
    }

    if (options.node_part) {
        const std::string c1 = options.elastic_nodes ? "C1-a" : "C1";
        for (std::size_t n = 0; n < N; ++n) {
            const auto& node = network.nodes()[n];
            for (std::size_t r = 0; r < kResources.size(); ++r) {
                const Resource res = kResources[r];
                std::vector<Term> terms;
                for (std::size_t v = 0; v < V; ++v) {
                    terms.push_back({x.xi[v][n], vm_demand(batch, idx, static_cast<int>(v)).demand[res]});
                }
                const std::string tag = c1 + " node " + std::to_string(n) + " " + to_string(res);
                if (options.elastic_nodes) {
                    x.sigma_vm[n][r] = m.add_continuous("sigma_vm_n" + std::to_string(n) + "_"
                                                        + to_string(res));
                    terms.push_back({x.sigma_vm[n][r], -1.0});
                }
                m.add_constraint(std::move(terms), Relation::less_equal, node.capacity[res], tag);
            }
        }
        for (std::size_t v = 0; v < V; ++v) {
            std::vector<Term> terms;
            for (std::size_t n = 0; n < N; ++n) {
                terms.push_back({x.xi[v][n], 1.0});
            }
            m.add_constraint(std::move(terms), Relation::equal, 1.0,
                             "C2 vm " + vm_name(batch, idx, static_cast<int>(v)));
        }
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t v = 0; v < V; ++v) {
                m.add_constraint({{x.xi[v][n], 1.0}, {x.gamma[n], -1.0}}, Relation::less_equal, 0.0,
                                 "C3 node " + std::to_string(n) + " vm "
                                     + vm_name(batch, idx, static_cast<int>(v)));
            }
        }
    }

    if (options.link_part && E > 0) {
        for (std::size_t e = 0; e < E; ++e) {
            const std::string name = vl_name(batch, idx, static_cast<int>(e));
            for (std::size_t s = 0; s < N; ++s) {
                for (std::size_t t = 0; t < N; ++t) {
                    x.theta[e][s * N + t] = m.add_binary("theta_" + name + "_n" + std::to_string(s)
                                                         + "n" + std::to_string(t));
                }
            }
            for (std::size_t k = 0; k < catalog.size(); ++k) {
                const auto* p = catalog[k];
                x.pi[e][k] = m.add_binary("pi_" + name + "_n" + std::to_string(p->source) + "n"
                                          + std::to_string(p->target) + "b"
                                          + std::to_string(p->ordinal));
            }
        }
        if (options.elastic_links) {
            for (std::size_t l = 0; l < network.link_count(); ++l) {
                x.sigma_bw[l] = m.add_continuous("sigma_bw_l" + std::to_string(l));
            }
            for (std::size_t s = 0; s < batch.size(); ++s) {
                if (!batch.slices[s].vls.empty()) {
                    x.sigma_tau[s] = m.add_continuous("sigma_tau_" + to_string(batch.slices[s].id));
                }
            }
        }

        for (std::size_t e = 0; e < E; ++e) {
            const std::string name = vl_name(batch, idx, static_cast<int>(e));
            std::vector<Term> c4;
            for (std::size_t k = 0; k < catalog.size(); ++k) {
                c4.push_back({x.pi[e][k], 1.0});
            }
            m.add_constraint(std::move(c4), Relation::equal, 1.0, "C4 vl " + name);

            const auto& vl = idx.vls[e];
            for (std::size_t s = 0; s < N; ++s) {
                for (std::size_t t = 0; t < N; ++t) {
                    const int th = x.theta[e][s * N + t];
                    const int xa = x.xi[static_cast<std::size_t>(vl.a)][s];
                    const int xb = x.xi[static_cast<std::size_t>(vl.b)][t];
                    const std::string where = " vl " + name + " n" + std::to_string(s) + "-n"
                        + std::to_string(t);
                    std::vector<Term> c5a{{th, -1.0}};
                    for (std::size_t k = 0; k < catalog.size(); ++k) {
                        if (catalog[k]->source == static_cast<int>(s)
                            && catalog[k]->target == static_cast<int>(t)) {
                            c5a.push_back({x.pi[e][k], 1.0});
                        }
                    }
                    m.add_constraint(std::move(c5a), Relation::equal, 0.0, "C5-a" + where);
                    m.add_constraint({{th, 1.0}, {xa, -1.0}, {xb, 1.0}}, Relation::less_equal, 1.0,
                                     "C5-b" + where);
                    m.add_constraint({{xa, 1.0}, {th, -1.0}, {xb, 1.0}}, Relation::less_equal, 1.0,
                                     "C5-c" + where);
                    m.add_constraint({{th, 1.0}, {xb, -1.0}}, Relation::less_equal, 0.0,
                                     "C5-d" + where);
                }
            }
        }

        const std::string c6 = options.elastic_links ? "C6-a" : "C6";
        for (std::size_t l = 0; l < network.link_count(); ++l) {
            std::vector<Term> terms;
            for (std::size_t e = 0; e < E; ++e) {
                const double rate = vl_demand(batch, idx, static_cast<int>(e)).rate;
                for (std::size_t k = 0; k < catalog.size(); ++k) {
                    if (catalog[k]->uses(static_cast<int>(l))) {
                        terms.push_back({x.pi[e][k], rate});
                    }
                }
            }
            if (options.elastic_links) {
                terms.push_back({x.sigma_bw[l], -1.0});
            }
            m.add_constraint(std::move(terms), Relation::less_equal,
                             network.links()[l].bandwidth, c6 + " link " + std::to_string(l));
        }

        const std::string c7 = options.elastic_links ? "C7-a" : "C7";
        for (std::size_t e = 0; e < E; ++e) {
            const auto& d = vl_demand(batch, idx, static_cast<int>(e));
            std::vector<Term> terms;
            for (std::size_t k = 0; k < catalog.size(); ++k) {
                terms.push_back({x.pi[e][k], path_delay(*catalog[k], network)});
            }
            if (options.elastic_links) {
                terms.push_back({x.sigma_tau[static_cast<std::size_t>(idx.vls[e].slice)], -1.0});
            }
            m.add_constraint(std::move(terms), Relation::less_equal, d.max_delay,
                             c7 + " vl " + vl_name(batch, idx, static_cast<int>(e)));
        }
    }

    switch (options.objective) {
    case Objective::slack:
        for (const auto& row : x.sigma_vm) {
            for (int v : row) {
                if (v >= 0) {
                    m.set_objective(v, 1.0);
                }
            }
        }
        for (int v : x.sigma_bw) {
            if (v >= 0) {
                m.set_objective(v, 1.0);
            }
        }
        for (int v : x.sigma_tau) {
            if (v >= 0) {
                m.set_objective(v, 1.0);
            }
        }
        break;
    case Objective::cost:
        if (options.link_part) {
            for (std::size_t e = 0; e < E; ++e) {
                const double rate = vl_demand(batch, idx, static_cast<int>(e)).rate;
                for (std::size_t k = 0; k < catalog.size(); ++k) {
                    m.set_objective(x.pi[e][k],
                                    weights.zeta * rate * path_unit_cost(*catalog[k], network));
                }
            }
        }
        [[fallthrough]];
    case Objective::power:
        for (std::size_t n = 0; n < N; ++n) {
            const auto& node = network.nodes()[n];
            m.set_objective(x.gamma[n], weights.upsilon * node.power_idle);
            const double per_mhz =
                weights.upsilon * (node.power_max - node.power_idle) / node.capacity.compute;
            for (std::size_t v = 0; v < V; ++v) {
                m.set_objective(x.xi[v][n],
                                per_mhz * vm_demand(batch, idx, static_cast<int>(v)).demand.compute);
            }
        }
        break;
    }
    return f;
}

std::vector<int> branch_priority(const Formulation& f)
{
    std::vector<int> prio(f.model.variable_count(), 0);
    for (const int v : f.vars.gamma) {
        prio[static_cast<std::size_t>(v)] = 2;
    }
    for (const auto& row : f.vars.xi) {
        for (const int v : row) {
            prio[static_cast<std::size_t>(v)] = 1;
        }
    }
    return prio;
}

Formulation build_jra_model(const PhysicalNetwork& network, const RequestBatch& batch,
                            const CostWeights& weights)
{
    return build_formulation(network, batch, weights, FormulationOptions{});
}

double node_power(const CloudNode& node, double utilization, bool on)
{
    return on ? (node.power_max - node.power_idle) * utilization + node.power_idle : 0.0;
}

double bandwidth_cost(const Placement& placement, const PhysicalNetwork& network,
                      const RequestBatch& batch)
{
    const auto catalog = path_catalog(network);
    const BatchIndex idx(batch);
    double beta = 0.0;
    for (std::size_t e = 0; e < idx.vls.size(); ++e) {
        const double rate = vl_demand(batch, idx, static_cast<int>(e)).rate;
        for (std::size_t k = 0; k < catalog.size(); ++k) {
            if (placement.pi[e][k]) {
                for (int l : catalog[k]->links) {
                    beta += network.links()[static_cast<std::size_t>(l)].unit_cost * rate;
                }
            }
        }
    }
    return beta;
}

CostReport evaluate_cost(const Placement& placement, const PhysicalNetwork& network,
                         const RequestBatch& batch, const CostWeights& weights)
{
    const BatchIndex idx(batch);
    const std::size_t N = network.node_count();
    CostReport r;
    r.utilization.assign(N, 0.0);
    r.node_power.assign(N, 0.0);
    for (std::size_t v = 0; v < idx.vms.size(); ++v) {
        const int h = placement.host(static_cast<int>(v));
        if (h >= 0) {
            r.utilization[static_cast<std::size_t>(h)] +=
                vm_demand(batch, idx, static_cast<int>(v)).demand.compute;
        }
    }
    for (std::size_t n = 0; n < N; ++n) {
        const auto& node = network.nodes()[n];
        r.utilization[n] /= node.capacity.compute;
        r.node_power[n] = node_power(node, r.utilization[n], placement.gamma[n] != 0);
        r.power += r.node_power[n];
    }
    r.beta = bandwidth_cost(placement, network, batch);
    r.total = weights.zeta * r.beta + weights.upsilon * r.power;
    return r;
}

Placement decode_placement(const Formulation& f, const milp::MilpSolution& solution,
                           const PhysicalNetwork& network, const RequestBatch& batch)
{
    Placement p = empty_placement(network, batch);
    auto bit = [&](int var) -> std::uint8_t {
        return var >= 0 && solution.value(var) > 0.5 ? 1 : 0;
    };
    for (std::size_t n = 0; n < p.gamma.size(); ++n) {
        p.gamma[n] = bit(f.vars.gamma[n]);
    }
    for (std::size_t v = 0; v < p.xi.size(); ++v) {
        for (std::size_t n = 0; n < p.gamma.size(); ++n) {
            p.xi[v][n] = bit(f.vars.xi[v][n]);
        }
    }
    for (std::size_t e = 0; e < p.pi.size(); ++e) {
        for (std::size_t k = 0; k < p.pi[e].size(); ++k) {
            p.pi[e][k] = bit(f.vars.pi[e][k]);
        }
        for (std::size_t q = 0; q < p.theta[e].size(); ++q) {
            p.theta[e][q] = bit(f.vars.theta[e][q]);
        }
    }
    return p;
}

void verify_placement(const Placement& placement, const PhysicalNetwork& network,
                      const RequestBatch& batch, const VerifyScope& scope)
{
    const BatchIndex idx(batch);
    const std::size_t N = network.node_count();
    const auto catalog = path_catalog(network);

    if (scope.nodes) {
        for (std::size_t v = 0; v < idx.vms.size(); ++v) {
            int count = 0;
            for (std::size_t n = 0; n < N; ++n) {
                count += placement.xi[v][n];
                if (placement.xi[v][n] && !placement.gamma[n]) {
                    throw InvariantViolation("C3", "VM " + vm_name(batch, idx, static_cast<int>(v))
                                                       + " sits on switched-off node "
                                                       + std::to_string(n));
                }
            }
            if (count != 1) {
                throw InvariantViolation("C2", "VM " + vm_name(batch, idx, static_cast<int>(v))
                                                   + " is placed on " + std::to_string(count)
                                                   + " nodes");
            }
        }
        for (std::size_t n = 0; n < N; ++n) {
            const auto& node = network.nodes()[n];
            for (const Resource r : kResources) {
                double used = 0.0;
                for (std::size_t v = 0; v < idx.vms.size(); ++v) {
                    if (placement.xi[v][n]) {
                        used += vm_demand(batch, idx, static_cast<int>(v)).demand[r];
                    }
                }
                if (!within(used, node.capacity[r])) {
                    throw InvariantViolation("C1", "node " + std::to_string(n) + " " + to_string(r)
                                                       + " load " + std::to_string(used)
                                                       + " exceeds capacity");
                }
            }
        }
    }

    if (scope.links) {
        std::vector<double> load(network.link_count(), 0.0);
        for (std::size_t e = 0; e < idx.vls.size(); ++e) {
            const std::string name = vl_name(batch, idx, static_cast<int>(e));
            const auto& vl = idx.vls[e];
            const auto& d = vl_demand(batch, idx, static_cast<int>(e));
            int chosen = 0;
            for (std::size_t k = 0; k < catalog.size(); ++k) {
                chosen += placement.pi[e][k];
            }
            if (chosen != 1) {
                throw InvariantViolation("C4", "VL " + name + " uses " + std::to_string(chosen)
                                                   + " paths");
            }
            for (std::size_t s = 0; s < N; ++s) {
                for (std::size_t t = 0; t < N; ++t) {
                    const int th = placement.theta[e][s * N + t];
                    const int xa = placement.xi[static_cast<std::size_t>(vl.a)][s];
                    const int xb = placement.xi[static_cast<std::size_t>(vl.b)][t];
                    int on_pair = 0;
                    for (std::size_t k = 0; k < catalog.size(); ++k) {
                        if (catalog[k]->source == static_cast<int>(s)
                            && catalog[k]->target == static_cast<int>(t)) {
                            on_pair += placement.pi[e][k];
                        }
                    }
                    const std::string where = "VL " + name + " pair n" + std::to_string(s) + "-n"
                        + std::to_string(t);
                    if (on_pair != th) {
                        throw InvariantViolation("C5-a", where + ": path choice disagrees with theta");
                    }
                    if (th > xa + 1 - xb) {
                        throw InvariantViolation("C5-b", where);
                    }
                    if (xa > th + 1 - xb) {
                        throw InvariantViolation("C5-c", where);
                    }
                    if (th > xb) {
                        throw InvariantViolation("C5-d", where);
                    }
                    if (th != xa * xb) {
                        throw InvariantViolation("C5", where + ": theta is not the product");
                    }
                }
            }
            const auto* path = catalog[static_cast<std::size_t>(placement.route(static_cast<int>(e)))];
            for (int l : path->links) {
                load[static_cast<std::size_t>(l)] += d.rate;
            }
            if (!within(path_delay(*path, network), d.max_delay)) {
                throw InvariantViolation("C7", "VL " + name + " path delay exceeds its bound");
            }
        }
        for (std::size_t l = 0; l < load.size(); ++l) {
            if (!within(load[l], network.links()[l].bandwidth)) {
                throw InvariantViolation("C6", "link " + std::to_string(l) + " carries "
                                                   + std::to_string(load[l]) + " Kbps");
            }
        }
    }
}

std::pair<Placement, CostReport> decode_and_cost(const Formulation& f,
                                                 const milp::MilpSolution& solution,
                                                 const PhysicalNetwork& network,
                                                 const RequestBatch& batch,
                                                 const CostWeights& weights)
{
    if (!solution.has_incumbent) {
        throw InvariantViolation("solution", "no assignment to decode");
    }
    if (f.model.max_integrality_violation(solution.assignment) > kAbsTol) {
        throw InvariantViolation("C8-C10", "binary variable is fractional");
    }
    Placement p = decode_placement(f, solution, network, batch);
    verify_placement(p, network, batch, VerifyScope{f.node_part || f.link_part, f.link_part});
    CostReport cost = evaluate_cost(p, network, batch, weights);
    double expected = cost.total;
    if (f.objective == Objective::power) {
        expected = weights.upsilon * cost.power;
    }
    if (f.objective != Objective::slack && std::abs(expected - solution.objective_value) > kAbsTol) {
        throw InvariantViolation("objective", "recomputed cost " + std::to_string(expected)
                                                  + " differs from solver objective "
                                                  + std::to_string(solution.objective_value));
    }
    return {std::move(p), std::move(cost)};
}

std::vector<double> encode_placement(const Formulation& f, const Placement& placement)
{
    std::vector<double> x(f.model.variable_count(), 0.0);
    auto put = [&](int var, std::uint8_t bit) {
        if (var >= 0) {
            x[static_cast<std::size_t>(var)] = bit;
        }
    };
    for (std::size_t n = 0; n < f.vars.gamma.size(); ++n) {
        put(f.vars.gamma[n], placement.gamma.at(n));
    }
    for (std::size_t v = 0; v < f.vars.xi.size(); ++v) {
        for (std::size_t n = 0; n < f.vars.xi[v].size(); ++n) {
            put(f.vars.xi[v][n], placement.xi.at(v).at(n));
        }
    }
    for (std::size_t e = 0; e < f.vars.pi.size(); ++e) {
        for (std::size_t k = 0; k < f.vars.pi[e].size(); ++k) {
            put(f.vars.pi[e][k], placement.pi.at(e).at(k));
        }
        for (std::size_t q = 0; q < f.vars.theta[e].size(); ++q) {
            put(f.vars.theta[e][q], placement.theta.at(e).at(q));
        }
    }
    return x;
}

Placement remap_placement(const Placement& placement, const PhysicalNetwork& network,
                          const RequestBatch& from, const RequestBatch& to)
{
    const BatchIndex src(from);
    const BatchIndex dst(to);
    Placement out = empty_placement(network, to);
    out.gamma = placement.gamma;
    for (std::size_t s = 0; s < to.slices.size(); ++s) {
        const auto it = std::find_if(from.slices.begin(), from.slices.end(),
                                     [&](const SliceRequest& r) { return r.id == to.slices[s].id; });
        if (it == from.slices.end()) {
            continue;
        }
        const auto fs = static_cast<std::size_t>(it - from.slices.begin());
        const auto vm0_src = static_cast<std::size_t>(src.first_vm[fs]);
        const auto vm0_dst = static_cast<std::size_t>(dst.first_vm[s]);
        for (std::size_t m = 0; m < to.slices[s].vms.size(); ++m) {
            out.xi[vm0_dst + m] = placement.xi.at(vm0_src + m);
        }
        std::size_t e_src = 0;
        while (e_src < src.vls.size() && src.vls[e_src].slice != static_cast<int>(fs)) {
            ++e_src;
        }
        for (std::size_t e = 0; e < dst.vls.size(); ++e) {
            if (dst.vls[e].slice == static_cast<int>(s)) {
                const auto from_e = e_src + static_cast<std::size_t>(dst.vls[e].vl);
                out.pi[e] = placement.pi.at(from_e);
                out.theta[e] = placement.theta.at(from_e);
            }
        }
    }
    return out;
}

void switch_off_idle(Placement& placement)
{
    for (std::size_t n = 0; n < placement.gamma.size(); ++n) {
        bool used = false;
        for (const auto& row : placement.xi) {
            used = used || row[n] != 0;
        }
        placement.gamma[n] = used ? 1 : 0;
    }
}

void route_first_paths(Placement& placement, const PhysicalNetwork& network,
                       const RequestBatch& batch)
{
    const BatchIndex idx(batch);
    const auto catalog = path_catalog(network);
    const std::size_t N = network.node_count();
    for (std::size_t e = 0; e < idx.vls.size(); ++e) {
        const int a = placement.host(idx.vls[e].a);
        const int b = placement.host(idx.vls[e].b);
        if (a < 0 || b < 0 || placement.route(static_cast<int>(e)) >= 0) {
            continue;
        }
        for (std::size_t k = 0; k < catalog.size(); ++k) {
            if (catalog[k]->source == a && catalog[k]->target == b) {
                placement.pi[e][k] = 1;
                placement.theta[e][static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)] = 1;
                break;
            }
        }
    }
}

Placement greedy_placement(const PhysicalNetwork& network, const RequestBatch& batch, bool split)
{
    const BatchIndex idx(batch);
    const std::size_t N = network.node_count();
    Placement p = empty_placement(network, batch);
    std::vector<ResourceVector> room;
    for (const auto& node : network.nodes()) {
        room.push_back(node.capacity);
    }
    auto fits = [&](std::size_t n, const ResourceVector& d) {
        for (const Resource r : kResources) {
            if (d[r] > room[n][r] + kAbsTol) {
                return false;
            }
        }
        return true;
    };
    auto put = [&](std::size_t v, std::size_t n) {
        p.xi[v][n] = 1;
        p.gamma[n] = 1;
        for (const Resource r : kResources) {
            room[n][r] -= vm_demand(batch, idx, static_cast<int>(v)).demand[r];
        }
    };

    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return total_rate(batch.slices[a]) > total_rate(batch.slices[b]);
    });
    for (const std::size_t s : order) {
        const auto& slice = batch.slices[s];
        const auto vm0 = static_cast<std::size_t>(idx.first_vm[s]);
        ResourceVector whole{};
        for (const Resource r : kResources) {
            whole[r] = total_demand(slice, r);
        }
        // best fit among switched-on nodes, then the first idle one
        int target = -1;
        for (std::size_t n = 0; n < N; ++n) {
            if (!fits(n, whole)) {
                continue;
            }
            const auto better = [&] {
                const auto t = static_cast<std::size_t>(target);
                if (p.gamma[n] != p.gamma[t]) {
                    return p.gamma[n] > p.gamma[t];
                }
                return room[n].compute < room[t].compute;
            };
            if (target < 0 || better()) {
                target = static_cast<int>(n);
            }
        }
        if (target >= 0) {
            for (std::size_t m = 0; m < slice.vms.size(); ++m) {
                put(vm0 + m, static_cast<std::size_t>(target));
            }
            continue;
        }
        // split VM by VM onto the roomiest node that fits; when some VM fits
        // nowhere, overfill the roomiest node with the whole slice instead
        const auto saved_room = room;
        std::vector<std::size_t> hosts;
        for (const auto& vm : slice.vms) {
            if (!split) {
                break;
            }
            int pick = -1;
            for (std::size_t c = 0; c < N; ++c) {
                if (fits(c, vm.demand)
                    && (pick < 0 || room[c].compute > room[static_cast<std::size_t>(pick)].compute)) {
                    pick = static_cast<int>(c);
                }
            }
            if (pick < 0) {
                break;
            }
            hosts.push_back(static_cast<std::size_t>(pick));
            for (const Resource r : kResources) {
                room[static_cast<std::size_t>(pick)][r] -= vm.demand[r];
            }
        }
        room = saved_room;
        if (hosts.size() < slice.vms.size()) {
            std::size_t roomiest = 0;
            for (std::size_t c = 1; c < N; ++c) {
                if (room[c].compute > room[roomiest].compute) {
                    roomiest = c;
                }
            }
            hosts.assign(slice.vms.size(), roomiest);
        }
        for (std::size_t m = 0; m < hosts.size(); ++m) {
            put(vm0 + m, hosts[m]);
        }
    }
    greedy_routes(p, network, batch);
    return p;
}

void greedy_routes(Placement& placement, const PhysicalNetwork& network,
                   const RequestBatch& batch)
{
    const BatchIndex idx(batch);
    const auto catalog = path_catalog(network);
    const std::size_t N = network.node_count();
    std::vector<double> room;
    for (const auto& l : network.links()) {
        room.push_back(l.bandwidth);
    }
    for (std::size_t e = 0; e < idx.vls.size(); ++e) {
        const int k = placement.route(static_cast<int>(e));
        if (k >= 0) {
            for (int l : catalog[static_cast<std::size_t>(k)]->links) {
                room[static_cast<std::size_t>(l)] -= vl_demand(batch, idx, static_cast<int>(e)).rate;
            }
        }
    }

    std::vector<std::size_t> order(idx.vls.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return vl_demand(batch, idx, static_cast<int>(a)).rate
            > vl_demand(batch, idx, static_cast<int>(b)).rate;
    });
    for (const std::size_t e : order) {
        const int a = placement.host(idx.vls[e].a);
        const int b = placement.host(idx.vls[e].b);
        if (a < 0 || b < 0 || placement.route(static_cast<int>(e)) >= 0) {
            continue;
        }
        const auto& d = vl_demand(batch, idx, static_cast<int>(e));
        int best = -1;
        std::tuple<bool, double, double> best_key;
        for (std::size_t k = 0; k < catalog.size(); ++k) {
            const auto* path = catalog[k];
            if (path->source != a || path->target != b) {
                continue;
            }
            double overflow = 0.0;
            for (int l : path->links) {
                const double r = room[static_cast<std::size_t>(l)];
                overflow += std::max(0.0, d.rate - std::max(0.0, r));
            }
            const std::tuple<bool, double, double> key{
                !within(path_delay(*path, network), d.max_delay), overflow,
                d.rate * path_unit_cost(*path, network)};
            if (best < 0 || key < best_key) {
                best = static_cast<int>(k);
                best_key = key;
            }
        }
        if (best < 0) {
            continue;
        }
        placement.pi[e][static_cast<std::size_t>(best)] = 1;
        placement.theta[e][static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)] = 1;
        for (int l : catalog[static_cast<std::size_t>(best)]->links) {
            room[static_cast<std::size_t>(l)] -= d.rate;
        }
    }
}

void write_placement_json(const Placement& placement, const CostReport& cost,
                          const PhysicalNetwork& network, const RequestBatch& batch,
                          std::ostream& out)
{
    using nlohmann::json;
    const BatchIndex idx(batch);
    const auto catalog = path_catalog(network);
    json j;
    j["vms"] = json::array();
    for (std::size_t v = 0; v < idx.vms.size(); ++v) {
        const auto& s = batch.slices[static_cast<std::size_t>(idx.vms[v].slice)];
        j["vms"].push_back({{"tenant", s.id.tenant},
                            {"slice", s.id.slice},
                            {"vm", idx.vms[v].vm},
                            {"node", placement.host(static_cast<int>(v))}});
    }
    j["vls"] = json::array();
    for (std::size_t e = 0; e < idx.vls.size(); ++e) {
        const auto& s = batch.slices[static_cast<std::size_t>(idx.vls[e].slice)];
        const auto& d = s.vls[static_cast<std::size_t>(idx.vls[e].vl)];
        json jl{{"tenant", s.id.tenant}, {"slice", s.id.slice}, {"a", d.a}, {"b", d.b}};
        const int r = placement.route(static_cast<int>(e));
        if (r >= 0) {
            const auto* p = catalog[static_cast<std::size_t>(r)];
            jl["path_nodes"] = p->nodes;
            jl["path_links"] = p->links;
            jl["delay_ms"] = path_delay(*p, network);
        } else {
            jl["path_nodes"] = nullptr;
        }
        j["vls"].push_back(std::move(jl));
    }
    std::vector<int> on(placement.gamma.begin(), placement.gamma.end());
    j["nodes_on"] = on;
    j["cost"] = {{"total", cost.total},
                 {"beta", cost.beta},
                 {"power_w", cost.power},
                 {"node_power_w", cost.node_power},
                 {"utilization", cost.utilization}};
    out << j.dump(2) << '\n';
}

} // namespace slicenet
