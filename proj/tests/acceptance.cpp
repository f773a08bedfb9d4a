// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance            all criteria
//   acceptance 1 3 7      a subset

#include "oracle/enumerate.hpp"
#include "slicenet/harness.hpp"
#include "slicenet/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

using namespace slicenet;

namespace {

// Pinned tolerances and budgets.
constexpr double kObjectiveTol = 1e-6;
constexpr int kOracleInstances = 240;
constexpr double kOracleBudgetS = 120.0;
constexpr int kEnumerateMaxVars = 20;
constexpr int kSoundnessSeeds = 50;
constexpr std::int64_t kSoundnessNodeLimit = 50;
constexpr int kSweepReplications = 5;
constexpr double kGapCenter = 0.46;
constexpr double kGapHalfWidth = 0.20;
constexpr int kThresholdLo = 5;
constexpr int kThresholdHi = 10;
constexpr double kSweepBudgetS = 1800.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

void report(int criterion, const std::string& name, const Verdict& v)
{
    std::cout << "criterion " << criterion << " " << (v.pass ? "PASS" : "FAIL") << "  " << name
              << ": " << v.detail << std::endl;
}

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Verdict theta_is_product(const Placement& p, const PhysicalNetwork& net, const RequestBatch& batch)
{
    const std::size_t N = net.node_count();
    std::size_t e = 0, base = 0;
    for (const auto& s : batch.slices) {
        for (const auto& vl : s.vls) {
            for (std::size_t n = 0; n < N; ++n) {
                for (std::size_t m = 0; m < N; ++m) {
                    const int want = p.xi[base + static_cast<std::size_t>(vl.a)][n]
                        * p.xi[base + static_cast<std::size_t>(vl.b)][m];
                    if (p.theta[e][n * N + m] != want) {
                        return {false, "theta mismatch at VL " + std::to_string(e)};
                    }
                }
            }
            ++e;
        }
        base += s.vms.size();
    }
    return {true, ""};
}

// 1: solver optimum equals exhaustive search for the joint, node and link
// problems on tiny instances.
Verdict oracle_equivalence()
{
    const auto t0 = Clock::now();
    const auto domain = slicenet::oracle::cross_check(1, kOracleInstances, 2, 2, 2, {});

    // second opinion at the model level: every 0/1 assignment of the same models
    int enumerated = 0;
    std::vector<std::string> failures = domain.failures;
    for (int i = 0; i < kOracleInstances; ++i) {
        const auto inst = slicenet::oracle::random_tiny_instance(static_cast<std::uint64_t>(1 + i), 2, 2, 2);
        Placement fixed = empty_placement(inst.network, inst.batch);
        for (std::size_t v = 0; v < inst.placement.host.size(); ++v) {
            fixed.xi[v][static_cast<std::size_t>(inst.placement.host[v])] = 1;
        }
        for (std::size_t n = 0; n < inst.placement.gamma.size(); ++n) {
            fixed.gamma[n] = static_cast<std::uint8_t>(inst.placement.gamma[n]);
        }
        for (int problem = 0; problem < 3; ++problem) {
            FormulationOptions o;
            if (problem == 1) {
                o.link_part = false;
                o.objective = Objective::power;
            } else if (problem == 2) {
                if (!inst.placement_fits) {
                    continue;
                }
                o.node_part = false;
                o.fixed = &fixed;
            }
            const auto f = build_formulation(inst.network, inst.batch, {}, o);
            if (f.model.variable_count() > static_cast<std::size_t>(kEnumerateMaxVars)) {
                continue;
            }
            ++enumerated;
            const auto expected = ::oracle::enumerate_binary(f.model);
            const auto sol = milp::solve(f.model, {});
            const bool agree = expected
                ? sol.status == milp::SolveStatus::optimal
                    && std::abs(sol.objective_value - expected->objective) <= kObjectiveTol
                : sol.status == milp::SolveStatus::infeasible;
            if (!agree) {
                failures.push_back("instance " + std::to_string(1 + i) + " problem "
                                   + std::to_string(problem) + " disagrees with 0/1 enumeration");
            }
        }
    }
    const double elapsed = seconds_since(t0);
    Verdict v;
    v.pass = failures.empty() && domain.instances >= 200 && elapsed < kOracleBudgetS;
    v.detail = std::to_string(domain.instances) + " instances, " + std::to_string(domain.solves)
        + " solves vs domain search (" + std::to_string(domain.feasible) + " feasible), "
        + std::to_string(enumerated) + " vs 0/1 enumeration, " + std::to_string(failures.size())
        + " mismatches, " + fmt("%.1f s", elapsed);
    if (!failures.empty()) {
        v.detail += "; first: " + failures.front();
    }
    return v;
}

// 2: theta equals the product of the decoded xi. The tiny instances are
// checked inside cross_check; here full-size solves are checked directly.
// Every sweep solve also passes through decode_and_cost, which rejects a
// theta that is not the product.
Verdict linearization()
{
    const auto tiny = slicenet::oracle::cross_check(1001, 100, 2, 2, 2, {});
    int checked = 0;
    std::string bad;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto net = generate_random_topology(4, seed);
        for (int t = 1; t <= 5; ++t) {
            const auto batch = generate_batch(t, 1, 3, VlShape::mesh, seed);
            const auto f = build_jra_model(net, batch, {});
            milp::SolverConfig c;
            c.options.branch_priority = branch_priority(f);
            c.options.initial_solution = encode_placement(f, greedy_placement(net, batch));
            c.options.node_limit = 1000;
            const auto sol = milp::solve(f.model, c);
            if (!sol.has_incumbent) {
                continue;
            }
            const auto p = decode_placement(f, sol, net, batch);
            const auto r = theta_is_product(p, net, batch);
            ++checked;
            if (!r.pass && bad.empty()) {
                bad = "seed " + std::to_string(seed) + " T=" + std::to_string(t) + ": " + r.detail;
            }
        }
    }
    Verdict v;
    v.pass = tiny.failures.empty() && bad.empty() && checked > 0;
    v.detail = std::to_string(tiny.solves) + " tiny solves and " + std::to_string(checked)
        + " full-size solves, " + std::to_string(tiny.failures.size() + (bad.empty() ? 0 : 1))
        + " violations" + (bad.empty() ? "" : "; " + bad);
    return v;
}

// 3: after AC-JRA the hard problem on the accepted set is feasible, and the
// loop ends within |batch| rounds.
Verdict admission_soundness()
{
    const auto t0 = Clock::now();
    milp::SolverConfig c;
    c.options.node_limit = kSoundnessNodeLimit;
    int batches = 0;
    std::vector<std::string> failures;
    for (int seed = 1; seed <= kSoundnessSeeds; ++seed) {
        const auto net = generate_random_topology(4, static_cast<std::uint64_t>(seed));
        for (int t = 1; t <= 16; ++t) {
            const auto batch = generate_batch(t, 1, 3, VlShape::mesh, static_cast<std::uint64_t>(seed));
            const auto out = run_ac_jra(net, batch, c);
            ++batches;
            const std::string tag = "seed " + std::to_string(seed) + " T=" + std::to_string(t);
            if (out.rounds > t) {
                failures.push_back(tag + ": " + std::to_string(out.rounds) + " rounds");
                continue;
            }
            if (!out.witness) {
                failures.push_back(tag + ": no zero-slack point");
                continue;
            }
            const auto f = build_jra_model(net, out.accepted, {});
            const auto x = encode_placement(f, *out.witness);
            if (f.model.max_violation(x) > kObjectiveTol) {
                failures.push_back(tag + ": zero-slack point violates the hard model");
                continue;
            }
            // the point above already proves feasibility; the solver only has
            // to accept it, so the root is enough
            milp::SolverConfig hard = c;
            hard.options.node_limit = 1;
            hard.options.branch_priority = branch_priority(f);
            hard.options.initial_solution = x;
            const auto sol = milp::solve(f.model, hard);
            if (!sol.has_incumbent) {
                failures.push_back(tag + ": hard problem reported " + milp::to_string(sol.status));
            }
        }
        std::cerr << "  soundness seed " << seed << " done, " << fmt("%.0f s", seconds_since(t0)) << '\n';
    }
    Verdict v;
    v.pass = failures.empty();
    v.detail = std::to_string(kSoundnessSeeds) + " seeds, " + std::to_string(batches) + " batches, "
        + std::to_string(failures.size()) + " failures, node limit "
        + std::to_string(kSoundnessNodeLimit) + ", " + fmt("%.0f s", seconds_since(t0));
    if (!failures.empty()) {
        v.detail += "; first: " + failures.front();
    }
    return v;
}

struct Sweep {
    std::vector<SweepRecord> records;
    double seconds = 0.0;
    std::string error;
};

Sweep run_default_sweep()
{
    ScenarioConfig config;
    config.replications = kSweepReplications;
    Sweep s;
    const auto t0 = Clock::now();
    try {
        s.records = run_sweep(config);
    } catch (const std::exception& e) {
        s.error = e.what();
    }
    s.seconds = seconds_since(t0);
    return s;
}

// 4: JRA on the DRA-accepted set is no dearer than DRA.
Verdict dominance(const Sweep& s)
{
    if (!s.error.empty()) {
        return {false, "sweep failed: " + s.error};
    }
    int cells = 0, violations = 0, proven = 0;
    for (const auto& r : s.records) {
        if (r.method != Method::dra) {
            continue;
        }
        ++cells;
        proven += r.joint_on_accepted_proven ? 1 : 0;
        if (r.joint_on_accepted > r.total_cost + kObjectiveTol * std::max(1.0, r.total_cost)) {
            ++violations;
        }
    }
    return {violations == 0 && cells > 0,
            std::to_string(cells) + " DRA cells, " + std::to_string(violations) + " violations, "
                + std::to_string(proven) + " joint solves proven optimal"};
}

// 5: mean acceptance gap over completed cells.
Verdict acceptance_gap(const Sweep& s)
{
    if (!s.error.empty()) {
        return {false, "sweep failed: " + s.error};
    }
    std::map<std::pair<int, int>, std::map<Method, const SweepRecord*>> cells;
    for (const auto& r : s.records) {
        cells[{r.replication, r.tenants}][r.method] = &r;
    }
    double sum_jra = 0.0, sum_dra = 0.0;
    int used = 0, skipped = 0;
    bool ones_at_one = true;
    for (const auto& [key, pair] : cells) {
        if (pair.size() != 2) {
            continue;
        }
        const auto* j = pair.at(Method::jra);
        const auto* d = pair.at(Method::dra);
        if (key.second == 1) {
            ones_at_one = ones_at_one && j->acceptance_ratio == 1.0 && d->acceptance_ratio == 1.0;
        }
        if (j->admission_limited || d->admission_limited) {
            ++skipped;
            continue;
        }
        sum_jra += j->acceptance_ratio;
        sum_dra += d->acceptance_ratio;
        ++used;
    }
    if (used == 0) {
        return {false, "no completed cells"};
    }
    const double gap = (sum_jra - sum_dra) / used;
    const bool count_ok = s.records.size() == static_cast<std::size_t>(16 * 2 * kSweepReplications);
    Verdict v;
    v.pass = gap > 0 && std::abs(gap - kGapCenter) <= kGapHalfWidth && ones_at_one && count_ok
        && s.seconds <= kSweepBudgetS;
    v.detail = "gap " + fmt("%.4f", gap) + " (JRA " + fmt("%.4f", sum_jra / used) + ", DRA "
        + fmt("%.4f", sum_dra / used) + ") over " + std::to_string(used) + " completed cells, "
        + std::to_string(skipped) + " limited cells skipped, " + std::to_string(kSweepReplications)
        + " seeds, sweep " + fmt("%.0f s", s.seconds)
        + (ones_at_one ? "" : ", acceptance below 1 at one tenant")
        + (count_ok ? "" : ", wrong record count");
    return v;
}

// 6: per seed, the smallest tenant count from which DRA accepts nothing
// while JRA still accepts something.
Verdict collapse_threshold(const Sweep& s)
{
    if (!s.error.empty()) {
        return {false, "sweep failed: " + s.error};
    }
    std::map<int, std::map<int, std::map<Method, const SweepRecord*>>> by_rep;
    for (const auto& r : s.records) {
        by_rep[r.replication][r.tenants][r.method] = &r;
    }
    bool pass = !by_rep.empty();
    std::string detail = "thresholds";
    for (const auto& [rep, cells] : by_rep) {
        int threshold = -1;
        for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
            const auto* j = it->second.at(Method::jra);
            const auto* d = it->second.at(Method::dra);
            const bool collapsed = d->acceptance_ratio == 0.0 && j->acceptance_ratio * j->offered >= 1.0;
            if (!collapsed) {
                break;
            }
            threshold = it->first;
        }
        detail += " " + (threshold < 0 ? std::string("none") : std::to_string(threshold));
        pass = pass && threshold >= kThresholdLo && threshold <= kThresholdHi;
    }
    return {pass, detail + " (seeds 1-" + std::to_string(by_rep.size()) + ")"};
}

// 7: cost model examples, and the independent cost recomputation on every
// sweep solve (decode_and_cost throws when it disagrees with the solver).
Verdict cost_model(const Sweep& s)
{
    std::vector<std::string> failures;
    const CloudNode node{0, {7000.0, 800.0, 2000.0}, 100.0, 200.0};
    if (node_power(node, 0.3, false) != 0.0) {
        failures.push_back("off node draws power");
    }
    if (node_power(node, 0.0, true) != 100.0) {
        failures.push_back("idle node power");
    }
    if (std::abs(node_power(node, 2000.0 / 7000.0, true) - 900.0 / 7.0) > 1e-12) {
        failures.push_back("loaded node power");
    }

    PhysicalNetwork line({node, {1, node.capacity, 100.0, 200.0}, {2, node.capacity, 100.0, 200.0}},
                         {{0, 1, 1e5, 1.0, 300.0, LinkKind::inter},
                          {1, 2, 1e5, 1.0, 700.0, LinkKind::inter},
                          {0, 0, 1e7, 0.0, 1.0, LinkKind::intra},
                          {1, 1, 1e7, 0.0, 1.0, LinkKind::intra},
                          {2, 2, 1e7, 0.0, 1.0, LinkKind::intra}});
    const auto net = enumerate_paths(line, 2);
    RequestBatch batch;
    SliceRequest sl;
    sl.id = {0, 0};
    sl.vms = {{sl.id, 0, {1000.0, 64.0, 120.0}}, {sl.id, 1, {1000.0, 64.0, 120.0}}};
    sl.vls = {{0, 1, 1e4, 10.0}};
    batch.slices = {sl};
    Placement p = empty_placement(net, batch);
    p.xi[0][0] = p.xi[1][0] = 1;
    p.gamma[0] = 1;
    route_first_paths(p, net, batch);
    if (bandwidth_cost(p, net, batch) != 1e4) {
        failures.push_back("intra VL beta");
    }
    p = empty_placement(net, batch);
    p.xi[0][0] = p.xi[1][2] = 1;
    p.gamma[0] = p.gamma[2] = 1;
    route_first_paths(p, net, batch);
    if (std::abs(bandwidth_cost(p, net, batch) - 1000.0 * 1e4) > 1e-6) {
        failures.push_back("two-link beta");
    }
    RequestBatch none;
    if (bandwidth_cost(empty_placement(net, none), net, none) != 0.0) {
        failures.push_back("empty beta");
    }

    int rows = 0;
    if (!s.error.empty()) {
        failures.push_back("sweep failed: " + s.error);
    }
    const CostWeights w;
    for (const auto& r : s.records) {
        ++rows;
        if (std::abs(r.total_cost - (w.zeta * r.beta + w.upsilon * r.power)) > kObjectiveTol) {
            failures.push_back("record total differs from its parts");
            break;
        }
    }
    Verdict v;
    v.pass = failures.empty();
    v.detail = "6 cost examples, " + std::to_string(rows)
        + " sweep records re-added, every sweep solve re-costed by decode_and_cost; "
        + std::to_string(failures.size()) + " failures" + (failures.empty() ? "" : ": " + failures.front());
    return v;
}

// 8: byte-identical CSV across two runs, wall time excluded.
Verdict determinism(const Sweep& a, const Sweep& b)
{
    if (!a.error.empty() || !b.error.empty()) {
        return {false, "sweep failed"};
    }
    std::ostringstream x, y;
    emit_csv(a.records, x, false);
    emit_csv(b.records, y, false);
    return {x.str() == y.str(), std::to_string(a.records.size()) + " rows, "
                                    + std::to_string(x.str().size()) + " bytes, "
                                    + (x.str() == y.str() ? "identical" : "different")};
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        wanted.insert(std::atoi(argv[i]));
    }
    auto want = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };
    bool all = true;
    auto run = [&](int c, const std::string& name, const Verdict& v) {
        report(c, name, v);
        all = all && v.pass;
    };

    if (want(1)) {
        run(1, "oracle equivalence", oracle_equivalence());
    }
    if (want(2)) {
        run(2, "linearization", linearization());
    }
    if (want(3)) {
        run(3, "admission soundness", admission_soundness());
    }
    const bool need_sweep = want(4) || want(5) || want(6) || want(7) || want(8);
    Sweep first;
    if (need_sweep) {
        first = run_default_sweep();
    }
    if (want(4)) {
        run(4, "dominance", dominance(first));
    }
    if (want(5)) {
        run(5, "acceptance gap", acceptance_gap(first));
    }
    if (want(6)) {
        run(6, "collapse threshold", collapse_threshold(first));
    }
    if (want(7)) {
        run(7, "cost model", cost_model(first));
    }
    if (want(8)) {
        run(8, "determinism", determinism(first, run_default_sweep()));
    }
    return all ? 0 : 1;
}
