#include "slicenet/oracle.hpp"

#include <cmath>
#include <random>

namespace slicenet::oracle {

namespace {

bool fits(double used, double cap)
{
    return used <= cap + 1e-6 + 1e-9 * std::abs(cap);
}

struct Flat {
    std::vector<ResourceVector> vm;  // demand per flat VM
    struct Link {
        int a, b;
        double rate, max_delay;
    };
    std::vector<Link> vl;
};

Flat flatten(const RequestBatch& batch)
{
    Flat f;
    for (const auto& s : batch.slices) {
        const int base = static_cast<int>(f.vm.size());
        for (const auto& vm : s.vms) {
            f.vm.push_back(vm.demand);
        }
        for (const auto& vl : s.vls) {
            f.vl.push_back({base + vl.a, base + vl.b, vl.rate, vl.max_delay});
        }
    }
    return f;
}

double power_of(const PhysicalNetwork& net, const Flat& f, const std::vector<int>& gamma,
                const std::vector<int>& host)
{
    double p = 0.0;
    for (std::size_t n = 0; n < net.node_count(); ++n) {
        const auto& node = net.nodes()[n];
        double com = 0.0;
        for (std::size_t v = 0; v < f.vm.size(); ++v) {
            if (host[v] == static_cast<int>(n)) {
                com += f.vm[v].compute;
            }
        }
        p += gamma[n] * node.power_idle + (node.power_max - node.power_idle) * com / node.capacity.compute;
    }
    return p;
}

bool nodes_ok(const PhysicalNetwork& net, const Flat& f, const std::vector<int>& gamma,
              const std::vector<int>& host)
{
    for (std::size_t n = 0; n < net.node_count(); ++n) {
        ResourceVector used;
        for (std::size_t v = 0; v < f.vm.size(); ++v) {
            if (host[v] == static_cast<int>(n)) {
                if (!gamma[n]) {
                    return false;
                }
                used.compute += f.vm[v].compute;
                used.memory += f.vm[v].memory;
                used.storage += f.vm[v].storage;
            }
        }
        const auto& cap = net.nodes()[n].capacity;
        if (!fits(used.compute, cap.compute) || !fits(used.memory, cap.memory)
            || !fits(used.storage, cap.storage)) {
            return false;
        }
    }
    return true;
}

// Best routing for fixed hosts by walking every path combination.
void best_routes(const PhysicalNetwork& net, const Flat& f, const CostWeights& w,
                 const std::vector<int>& gamma, const std::vector<int>& host, double power,
                 std::optional<Choice>& best)
{
    const std::size_t E = f.vl.size();
    std::vector<const std::vector<PhysicalPath>*> options(E);
    for (std::size_t e = 0; e < E; ++e) {
        options[e] = &net.paths(host[static_cast<std::size_t>(f.vl[e].a)],
                                host[static_cast<std::size_t>(f.vl[e].b)]);
        if (options[e]->empty()) {
            return;
        }
    }
    std::vector<std::size_t> pick(E, 0);
    for (;;) {
        std::vector<double> load(net.link_count(), 0.0);
        double beta = 0.0;
        bool ok = true;
        for (std::size_t e = 0; e < E && ok; ++e) {
            const auto& path = (*options[e])[pick[e]];
            double delay = 0.0;
            for (int l : path.links) {
                const auto& link = net.links()[static_cast<std::size_t>(l)];
                delay += link.delay;
                load[static_cast<std::size_t>(l)] += f.vl[e].rate;
                beta += link.unit_cost * f.vl[e].rate;
            }
            ok = fits(delay, f.vl[e].max_delay);
        }
        for (std::size_t l = 0; l < load.size() && ok; ++l) {
            ok = fits(load[l], net.links()[l].bandwidth);
        }
        if (ok) {
            const double cost = w.zeta * beta + w.upsilon * power;
            if (!best || cost < best->cost) {
                Choice c;
                c.gamma = gamma;
                c.host = host;
                for (std::size_t e = 0; e < E; ++e) {
                    c.route.push_back(&(*options[e])[pick[e]]);
                }
                c.cost = cost;
                best = std::move(c);
            }
        }
        std::size_t e = 0;
        while (e < E && ++pick[e] == options[e]->size()) {
            pick[e++] = 0;
        }
        if (e == E) {
            break;
        }
    }
}

} // namespace

std::optional<Choice> brute_force(const PhysicalNetwork& network, const RequestBatch& batch,
                                  const CostWeights& weights, Problem problem,
                                  const FixedPlacement* fixed)
{
    const Flat f = flatten(batch);
    const std::size_t N = network.node_count();
    const std::size_t V = f.vm.size();
    std::optional<Choice> best;

    if (problem == Problem::links) {
        if (fixed == nullptr) {
            throw std::invalid_argument("links problem needs a fixed placement");
        }
        const double power = power_of(network, f, fixed->gamma, fixed->host);
        best_routes(network, f, weights, fixed->gamma, fixed->host, power, best);
        return best;
    }

    std::vector<int> gamma(N, 0);
    for (std::size_t mask = 0; mask < (std::size_t{1} << N); ++mask) {
        for (std::size_t n = 0; n < N; ++n) {
            gamma[n] = (mask >> n) & 1U;
        }
        std::vector<int> host(V, 0);
        for (;;) {
            if (nodes_ok(network, f, gamma, host)) {
                const double power = power_of(network, f, gamma, host);
                if (problem == Problem::nodes) {
                    const double cost = weights.upsilon * power;
                    if (!best || cost < best->cost) {
                        best = Choice{gamma, host, {}, cost};
                    }
                } else {
                    best_routes(network, f, weights, gamma, host, power, best);
                }
            }
            std::size_t v = 0;
            while (v < V && ++host[v] == static_cast<int>(N)) {
                host[v++] = 0;
            }
            if (v == V) {
                break;
            }
        }
    }
    return best;
}

double search_size(const PhysicalNetwork& network, const RequestBatch& batch, Problem problem)
{
    const Flat f = flatten(batch);
    const double N = static_cast<double>(network.node_count());
    double max_paths = 1.0;
    for (std::size_t s = 0; s < network.node_count(); ++s) {
        for (std::size_t t = 0; t < network.node_count(); ++t) {
            max_paths = std::max(max_paths, static_cast<double>(
                                                network.paths(static_cast<int>(s), static_cast<int>(t)).size()));
        }
    }
    const double routes = std::pow(max_paths, static_cast<double>(f.vl.size()));
    if (problem == Problem::links) {
        return routes;
    }
    const double places = std::pow(2.0, N) * std::pow(N, static_cast<double>(f.vm.size()));
    return problem == Problem::nodes ? places : places * routes;
}

TinyInstance random_tiny_instance(std::uint64_t seed, int max_nodes, int max_slices, int max_vms)
{
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    const int N = pick(1, max_nodes);
    std::vector<CloudNode> nodes;
    for (int n = 0; n < N; ++n) {
        CloudNode c;
        c.id = n;
        c.capacity = {1000.0 * pick(1, 3), 64.0 * pick(1, 3), 120.0 * pick(1, 3)};
        c.power_idle = uni(50.0, 150.0);
        c.power_max = c.power_idle + uni(10.0, 150.0);
        nodes.push_back(c);
    }
    std::vector<PhysicalLink> links;
    for (int u = 0; u < N; ++u) {
        for (int v = u + 1; v < N; ++v) {
            links.push_back({u, v, uni(1e4, 1.5e5), uni(0.1, 6.0), uni(90.0, 1900.0),
                             LinkKind::inter});
        }
    }
    for (int n = 0; n < N; ++n) {
        links.push_back({n, n, uni(1e4, 2.5e5), 0.0, 1.0, LinkKind::intra});
    }

    TinyInstance out;
    out.network = enumerate_paths(PhysicalNetwork(std::move(nodes), std::move(links)), 4);

    const int S = pick(1, max_slices);
    for (int s = 0; s < S; ++s) {
        SliceRequest r;
        r.id = {s, 0};
        const int M = pick(1, max_vms);
        for (int m = 0; m < M; ++m) {
            r.vms.push_back({r.id, m, {1000.0 * pick(1, 2), 64.0 * pick(0, 2), 120.0 * pick(0, 2)}});
        }
        for (int a = 0; a < M; ++a) {
            for (int b = a + 1; b < M; ++b) {
                r.vls.push_back({a, b, uni(1e4, 1.1e5), uni(0.0, 8.0)});
            }
        }
        out.batch.slices.push_back(std::move(r));
    }
    // Host maps are redrawn until one fits, as the link stage only ever sees
    // placements that passed the node stage.
    const Flat flat = flatten(out.batch);
    std::vector<int> all_on(static_cast<std::size_t>(N), 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        out.placement.host.clear();
        for (std::size_t v = 0; v < flat.vm.size(); ++v) {
            out.placement.host.push_back(pick(0, N - 1));
        }
        out.placement_fits = nodes_ok(out.network, flat, all_on, out.placement.host);
        if (out.placement_fits) {
            break;
        }
    }
    out.placement.gamma.assign(static_cast<std::size_t>(N), 0);
    for (int h : out.placement.host) {
        out.placement.gamma[static_cast<std::size_t>(h)] = 1;
    }
    for (auto& g : out.placement.gamma) {
        g = g || pick(0, 3) == 0;
    }
    return out;
}

} // namespace slicenet::oracle

namespace slicenet::oracle {

namespace {

std::string theta_mismatch(const Placement& p, const PhysicalNetwork& network, const RequestBatch& batch)
{
    const std::size_t N = network.node_count();
    std::size_t e = 0;
    std::size_t base = 0;
    for (const auto& s : batch.slices) {
        for (const auto& vl : s.vls) {
            for (std::size_t n = 0; n < N; ++n) {
                for (std::size_t m = 0; m < N; ++m) {
                    const int product = p.xi[base + static_cast<std::size_t>(vl.a)][n]
                        * p.xi[base + static_cast<std::size_t>(vl.b)][m];
                    if (p.theta[e][n * N + m] != product) {
                        return "theta[" + std::to_string(e) + "][" + std::to_string(n) + ","
                            + std::to_string(m) + "] != xi*xi'";
                    }
                }
            }
            ++e;
        }
        base += s.vms.size();
    }
    return {};
}

} // namespace

CrossCheck cross_check(std::uint64_t first_seed, int instances, int max_nodes, int max_slices,
                       int max_vms, const milp::SolverConfig& solver)
{
    CrossCheck out;
    const CostWeights weights;
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
        const TinyInstance inst = random_tiny_instance(seed, max_nodes, max_slices, max_vms);
        ++out.instances;

        Placement fixed = empty_placement(inst.network, inst.batch);
        for (std::size_t v = 0; v < inst.placement.host.size(); ++v) {
            fixed.xi[v][static_cast<std::size_t>(inst.placement.host[v])] = 1;
        }
        for (std::size_t n = 0; n < inst.placement.gamma.size(); ++n) {
            fixed.gamma[n] = static_cast<std::uint8_t>(inst.placement.gamma[n]);
        }

        for (const Problem problem : {Problem::joint, Problem::nodes, Problem::links}) {
            if (problem == Problem::links && !inst.placement_fits) {
                continue;
            }
            FormulationOptions o;
            const char* name = "joint";
            if (problem == Problem::nodes) {
                o.link_part = false;
                o.objective = Objective::power;
                name = "nodes";
            } else if (problem == Problem::links) {
                o.node_part = false;
                o.fixed = &fixed;
                name = "links";
            }
            const Formulation f = build_formulation(inst.network, inst.batch, weights, o);
            const milp::MilpSolution sol = milp::solve(f.model, solver);
            ++out.solves;
            const auto expected = brute_force(inst.network, inst.batch, weights, problem,
                                              problem == Problem::links ? &inst.placement : nullptr);
            const std::string tag = "seed " + std::to_string(seed) + " " + name + ": ";
            if (sol.status == milp::SolveStatus::infeasible) {
                if (expected) {
                    out.failures.push_back(tag + "solver infeasible, enumeration found "
                                           + std::to_string(expected->cost));
                }
                continue;
            }
            if (sol.status != milp::SolveStatus::optimal) {
                out.failures.push_back(tag + "solver status " + milp::to_string(sol.status));
                continue;
            }
            if (!expected) {
                out.failures.push_back(tag + "solver found " + std::to_string(sol.objective_value)
                                       + ", enumeration infeasible");
                continue;
            }
            if (std::abs(sol.objective_value - expected->cost) > 1e-6 * std::max(1.0, std::abs(expected->cost))) {
                out.failures.push_back(tag + "objective " + std::to_string(sol.objective_value)
                                       + " vs enumeration " + std::to_string(expected->cost));
                continue;
            }
            ++out.feasible;
            if (problem != Problem::nodes) {
                try {
                    const auto decoded = decode_and_cost(f, sol, inst.network, inst.batch, weights);
                    const std::string bad = theta_mismatch(decoded.first, inst.network, inst.batch);
                    if (!bad.empty()) {
                        out.failures.push_back(tag + bad);
                    }
                } catch (const std::exception& e) {
                    out.failures.push_back(tag + e.what());
                }
            }
        }
    }
    return out;
}

} // namespace slicenet::oracle
