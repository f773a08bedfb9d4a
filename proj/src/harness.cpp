#include "slicenet/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace slicenet {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) {
        throw HarnessError(where + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw HarnessError("unknown key '" + key + "' in " + where);
        }
    }
}

Range read_range(const json& j, const std::string& key)
{
    if (!j.is_array() || j.size() != 2) {
        throw HarnessError("'" + key + "' must be a [lo, hi] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json range_json(const Range& r)
{
    return json::array({r.lo, r.hi});
}

ResourceVector read_resources(const json& j, const std::string& where)
{
    check_keys(j, {"com_mhz", "mem_gb", "sto_gb"}, where);
    return {j.value("com_mhz", 0.0), j.value("mem_gb", 0.0), j.value("sto_gb", 0.0)};
}

json resources_json(const ResourceVector& r)
{
    return {{"com_mhz", r.compute}, {"mem_gb", r.memory}, {"sto_gb", r.storage}};
}

std::string fmt(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// Cheapest of the admission witness and the greedy packings, as a start
// for the joint solve.
std::vector<double> joint_start(const Formulation& f, const PhysicalNetwork& network,
                                const RequestBatch& batch, const std::optional<Placement>& witness)
{
    std::vector<std::vector<double>> candidates;
    if (witness) {
        Placement w = *witness;
        switch_off_idle(w);
        candidates.push_back(encode_placement(f, w));
    }
    candidates.push_back(encode_placement(f, greedy_placement(network, batch, true)));
    candidates.push_back(encode_placement(f, greedy_placement(network, batch, false)));
    std::vector<double> best;
    double best_z = milp::kInfinity;
    for (auto& x : candidates) {
        if (f.model.max_violation(x) <= 1e-6) {
            const double z = f.model.evaluate_objective(x);
            if (z < best_z) {
                best_z = z;
                best = std::move(x);
            }
        }
    }
    return best;
}

struct JointSolve {
    Placement placement;
    CostReport cost;
    milp::SolveStatus status = milp::SolveStatus::optimal;
};

JointSolve solve_joint(const PhysicalNetwork& network, const RequestBatch& batch,
                       const CostWeights& weights, const milp::SolverConfig& solver,
                       std::vector<double> start)
{
    const Formulation f = build_jra_model(network, batch, weights);
    milp::SolverConfig config = solver;
    config.options.branch_priority = branch_priority(f);
    config.options.initial_solution = std::move(start);
    const milp::MilpSolution sol = milp::solve(f.model, config);
    if (!sol.has_incumbent) {
        throw InfeasibleAfterAdmission("joint problem has no solution on " + std::to_string(batch.size())
                                       + " admitted slices (" + milp::to_string(sol.status) + ")");
    }
    auto [placement, cost] = decode_and_cost(f, sol, network, batch, weights);
    return {std::move(placement), std::move(cost), sol.status};
}

} // namespace

std::uint64_t ScenarioConfig::replication_seed(int r) const
{
    return seed + static_cast<std::uint64_t>(r);
}

milp::SolverConfig ScenarioConfig::solver_config() const
{
    milp::SolverConfig c;
    c.kind = solver;
    c.external_command = external_command;
    c.options.time_limit_s = time_limit_s;
    c.options.node_limit = node_limit;
    return c;
}

void ScenarioConfig::validate() const
{
    if (node_count < 1) {
        throw HarnessError("node_count must be at least 1");
    }
    if (tenant_min < 1 || tenant_max < tenant_min) {
        throw HarnessError("tenant_range must satisfy 1 <= min <= max");
    }
    if (slices_per_tenant < 1 || vms_per_slice < 1) {
        throw HarnessError("slices_per_tenant and vms_per_slice must be at least 1");
    }
    if (replications < 1) {
        throw HarnessError("replications must be at least 1");
    }
    if (!(time_limit_s > 0)) {
        throw HarnessError("time_limit_s must be positive");
    }
    if (!(weights.zeta >= 0) || !(weights.upsilon >= 0)) {
        throw HarnessError("weights must be nonnegative");
    }
}

ScenarioConfig load_config_json(std::istream& in)
{
    ScenarioConfig c;
    try {
        json j;
        in >> j;
        check_keys(j,
                   {"seed", "node_count", "tenant_range", "slices_per_tenant", "vms_per_slice",
                    "vl_shape", "weights", "time_limit_s", "node_limit", "replications", "solver",
                    "external_command", "topology", "slices"},
                   "config");
        c.seed = j.value("seed", c.seed);
        c.node_count = j.value("node_count", c.node_count);
        if (j.contains("tenant_range")) {
            const Range r = read_range(j["tenant_range"], "tenant_range");
            c.tenant_min = static_cast<int>(r.lo);
            c.tenant_max = static_cast<int>(r.hi);
        }
        c.slices_per_tenant = j.value("slices_per_tenant", c.slices_per_tenant);
        c.vms_per_slice = j.value("vms_per_slice", c.vms_per_slice);
        if (j.contains("vl_shape")) {
            c.vl_shape = parse_vl_shape(j["vl_shape"].get<std::string>());
        }
        if (j.contains("weights")) {
            check_keys(j["weights"], {"zeta", "upsilon"}, "weights");
            c.weights.zeta = j["weights"].value("zeta", c.weights.zeta);
            c.weights.upsilon = j["weights"].value("upsilon", c.weights.upsilon);
        }
        if (j.contains("time_limit_s") && !j["time_limit_s"].is_null()) {
            c.time_limit_s = j["time_limit_s"].get<double>();
        }
        if (j.contains("node_limit") && !j["node_limit"].is_null()) {
            c.node_limit = j["node_limit"].get<std::int64_t>();
        }
        c.replications = j.value("replications", c.replications);
        if (j.contains("solver")) {
            const auto s = j["solver"].get<std::string>();
            if (s == "internal") {
                c.solver = milp::SolverKind::internal;
            } else if (s == "adapter") {
                c.solver = milp::SolverKind::external;
            } else {
                throw HarnessError("solver must be 'internal' or 'adapter'");
            }
        }
        c.external_command = j.value("external_command", c.external_command);
        if (j.contains("topology")) {
            const json& t = j["topology"];
            check_keys(t,
                       {"edge_probability", "capacity", "power_idle_w", "power_max_w",
                        "inter_bandwidth_kbps", "inter_delay_ms", "inter_cost_factor",
                        "inter_unit_cost", "intra_bandwidth_kbps", "intra_delay_ms",
                        "intra_unit_cost", "max_hops"},
                       "topology");
            auto& p = c.topology;
            p.edge_probability = t.value("edge_probability", p.edge_probability);
            if (t.contains("capacity")) {
                p.capacity = read_resources(t["capacity"], "topology.capacity");
            }
            p.power_idle = t.value("power_idle_w", p.power_idle);
            p.power_max = t.value("power_max_w", p.power_max);
            if (t.contains("inter_bandwidth_kbps")) {
                p.inter_bandwidth = read_range(t["inter_bandwidth_kbps"], "inter_bandwidth_kbps");
            }
            if (t.contains("inter_delay_ms")) {
                p.inter_delay = read_range(t["inter_delay_ms"], "inter_delay_ms");
            }
            if (t.contains("inter_cost_factor")) {
                p.inter_cost_factor = read_range(t["inter_cost_factor"], "inter_cost_factor");
            }
            if (t.contains("inter_unit_cost") && !t["inter_unit_cost"].is_null()) {
                p.inter_unit_cost_override = t["inter_unit_cost"].get<double>();
            }
            p.intra_bandwidth = t.value("intra_bandwidth_kbps", p.intra_bandwidth);
            p.intra_delay = t.value("intra_delay_ms", p.intra_delay);
            p.intra_unit_cost = t.value("intra_unit_cost", p.intra_unit_cost);
            p.max_hops = t.value("max_hops", p.max_hops);
        }
        if (j.contains("slices")) {
            const json& s = j["slices"];
            check_keys(s, {"vm_demand", "rate_kbps", "max_delay_ms"}, "slices");
            if (s.contains("vm_demand")) {
                c.slices.vm_demand = read_resources(s["vm_demand"], "slices.vm_demand");
            }
            if (s.contains("rate_kbps")) {
                c.slices.rate = read_range(s["rate_kbps"], "rate_kbps");
            }
            if (s.contains("max_delay_ms")) {
                c.slices.max_delay = read_range(s["max_delay_ms"], "max_delay_ms");
            }
        }
    } catch (const json::exception& e) {
        throw HarnessError(std::string("config JSON: ") + e.what());
    } catch (const SliceError& e) {
        throw HarnessError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

void write_config_json(const ScenarioConfig& c, std::ostream& out)
{
    const auto& p = c.topology;
    json j{{"seed", c.seed},
           {"node_count", c.node_count},
           {"tenant_range", json::array({c.tenant_min, c.tenant_max})},
           {"slices_per_tenant", c.slices_per_tenant},
           {"vms_per_slice", c.vms_per_slice},
           {"vl_shape", to_string(c.vl_shape)},
           {"weights", {{"zeta", c.weights.zeta}, {"upsilon", c.weights.upsilon}}},
           {"node_limit", c.node_limit},
           {"replications", c.replications},
           {"solver", c.solver == milp::SolverKind::internal ? "internal" : "adapter"},
           {"external_command", c.external_command},
           {"topology",
            {{"edge_probability", p.edge_probability},
             {"capacity", resources_json(p.capacity)},
             {"power_idle_w", p.power_idle},
             {"power_max_w", p.power_max},
             {"inter_bandwidth_kbps", range_json(p.inter_bandwidth)},
             {"inter_delay_ms", range_json(p.inter_delay)},
             {"inter_cost_factor", range_json(p.inter_cost_factor)},
             {"inter_unit_cost",
              p.inter_unit_cost_override >= 0 ? json(p.inter_unit_cost_override) : json(nullptr)},
             {"intra_bandwidth_kbps", p.intra_bandwidth},
             {"intra_delay_ms", p.intra_delay},
             {"intra_unit_cost", p.intra_unit_cost},
             {"max_hops", p.max_hops}}},
           {"slices",
            {{"vm_demand", resources_json(c.slices.vm_demand)},
             {"rate_kbps", range_json(c.slices.rate)},
             {"max_delay_ms", range_json(c.slices.max_delay)}}}};
    j["time_limit_s"] = std::isfinite(c.time_limit_s) ? json(c.time_limit_s) : json(nullptr);
    out << j.dump(2) << '\n';
}

const char* to_string(Method method)
{
    return method == Method::jra ? "JRA" : "DRA";
}

std::vector<SweepRecord> run_sweep(const ScenarioConfig& config,
                                   const std::function<void(const SweepRecord&)>& progress)
{
    config.validate();
    const milp::SolverConfig solver = config.solver_config();
    std::vector<SweepRecord> records;
    for (int rep = 0; rep < config.replications; ++rep) {
        const std::uint64_t seed = config.replication_seed(rep);
        const PhysicalNetwork network =
            generate_random_topology(config.node_count, seed, config.topology);
        for (int t = config.tenant_min; t <= config.tenant_max; ++t) {
            const RequestBatch batch = generate_batch(t, config.slices_per_tenant,
                                                      config.vms_per_slice, config.vl_shape, seed,
                                                      config.slices);
            const int offered = static_cast<int>(batch.size());

            SweepRecord jra;
            jra.method = Method::jra;
            jra.tenants = t;
            jra.replication = rep;
            jra.offered = offered;
            auto start = Clock::now();
            const AdmissionOutcome admitted = run_ac_jra(network, batch, solver);
            const Formulation shape = build_jra_model(network, admitted.accepted, config.weights);
            const JointSolve joint =
                solve_joint(network, admitted.accepted, config.weights, solver,
                            joint_start(shape, network, admitted.accepted, admitted.witness));
            jra.wall_ms = elapsed_ms(start);
            jra.total_cost = joint.cost.total;
            jra.beta = joint.cost.beta;
            jra.power = joint.cost.power;
            jra.rejected = offered - static_cast<int>(admitted.accepted.size());
            jra.acceptance_ratio = static_cast<double>(admitted.accepted.size()) / offered;
            jra.admission_limited = admitted.limited;
            jra.allocation_limited = joint.status == milp::SolveStatus::time_limit;
            records.push_back(jra);
            if (progress) {
                progress(jra);
            }

            SweepRecord dra;
            dra.method = Method::dra;
            dra.tenants = t;
            dra.replication = rep;
            dra.offered = offered;
            start = Clock::now();
            const DisjointResult d = run_dra_pipeline(network, batch, config.weights, solver);
            dra.wall_ms = elapsed_ms(start);
            dra.total_cost = d.combined_cost;
            dra.beta = d.beta;
            dra.power = d.power;
            dra.rejected = offered - static_cast<int>(d.accepted.size());
            dra.acceptance_ratio = static_cast<double>(d.accepted.size()) / offered;
            dra.collapse = d.collapse_flag;
            dra.admission_limited = d.node_admission.limited || d.link_admission.limited;
            dra.allocation_limited = d.node_stage.status == milp::SolveStatus::time_limit
                || d.link_stage.status == milp::SolveStatus::time_limit;

            const Formulation on_s = build_jra_model(network, d.accepted, config.weights);
            const JointSolve check = solve_joint(network, d.accepted, config.weights, solver,
                                                 encode_placement(on_s, d.joint_point));
            dra.joint_on_accepted = check.cost.total;
            dra.joint_on_accepted_proven = check.status == milp::SolveStatus::optimal;
            records.push_back(dra);
            if (progress) {
                progress(dra);
            }
        }
    }
    return records;
}

void emit_csv(const std::vector<SweepRecord>& records, std::ostream& out, bool include_wall_time)
{
    std::vector<SweepRecord> rows = records;
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return std::make_tuple(a.method, a.tenants, a.replication)
            < std::make_tuple(b.method, b.tenants, b.replication);
    });
    out << "method,tenants,replication,total_cost,beta,power_w,acceptance_ratio,rejected,";
    out << (include_wall_time ? "wall_ms," : "");
    out << "collapse,admission_limited,allocation_limited\n";
    for (const auto& r : rows) {
        out << to_string(r.method) << ',' << r.tenants << ',' << r.replication << ','
            << fmt(r.total_cost, 6) << ',' << fmt(r.beta, 6) << ',' << fmt(r.power, 6) << ','
            << fmt(r.acceptance_ratio, 6) << ',' << r.rejected << ',';
        if (include_wall_time) {
            out << fmt(r.wall_ms, 1) << ',';
        }
        out << (r.collapse ? 1 : 0) << ',' << (r.admission_limited ? 1 : 0) << ','
            << (r.allocation_limited ? 1 : 0) << '\n';
    }
}

void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw HarnessError("cannot write " + path.string());
    }
    emit_csv(records, out);
    if (!out) {
        throw HarnessError("error while writing " + path.string());
    }
}

const char* to_string(Figure figure)
{
    switch (figure) {
    case Figure::cost:
        return "cost";
    case Figure::acceptance:
        return "acceptance";
    case Figure::rejected:
        return "rejected";
    case Figure::beta:
        return "beta";
    case Figure::time:
        return "time";
    }
    return "?";
}

Figure parse_figure(const std::string& name)
{
    for (const Figure f :
         {Figure::cost, Figure::acceptance, Figure::rejected, Figure::beta, Figure::time}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw HarnessError("unknown figure '" + name + "' (cost, acceptance, rejected, beta, time)");
}

void emit_svg(const std::vector<SweepRecord>& records, Figure figure, std::ostream& out)
{
    if (records.empty()) {
        throw HarnessError("no records to plot");
    }
    auto metric = [&](const SweepRecord& r) {
        switch (figure) {
        case Figure::cost:
            return r.total_cost;
        case Figure::acceptance:
            return r.acceptance_ratio;
        case Figure::rejected:
            return static_cast<double>(r.rejected);
        case Figure::beta:
            return r.beta;
        case Figure::time:
            return r.wall_ms;
        }
        return 0.0;
    };
    static const std::map<Figure, std::pair<const char*, const char*>> kLabels{
        {Figure::cost, {"Total cost", "cost"}},
        {Figure::acceptance, {"Acceptance ratio", "accepted / offered"}},
        {Figure::rejected, {"Rejected slice requests", "slices"}},
        {Figure::beta, {"Bandwidth consumption cost", "beta"}},
        {Figure::time, {"Average execution time", "ms"}},
    };

    // mean per (method, tenants)
    std::map<Method, std::map<int, std::pair<double, int>>> sums;
    for (const auto& r : records) {
        auto& cell = sums[r.method][r.tenants];
        cell.first += metric(r);
        cell.second += 1;
    }
    int x_lo = records.front().tenants;
    int x_hi = x_lo;
    double y_hi = 0.0;
    for (const auto& [m, series] : sums) {
        for (const auto& [t, cell] : series) {
            x_lo = std::min(x_lo, t);
            x_hi = std::max(x_hi, t);
            y_hi = std::max(y_hi, cell.first / cell.second);
        }
    }
    if (figure == Figure::acceptance) {
        y_hi = 1.0;
    }
    if (!(y_hi > 0)) {
        y_hi = 1.0;
    }
    // round the axis top to 1, 2 or 5 times a power of ten
    const double mag = std::pow(10.0, std::floor(std::log10(y_hi)));
    for (const double step : {1.0, 2.0, 5.0, 10.0}) {
        if (y_hi <= step * mag) {
            y_hi = step * mag;
            break;
        }
    }

    const double W = 640, H = 400, L = 80, R = 20, T = 40, B = 50;
    auto px = [&](double t) {
        return x_hi == x_lo ? L + (W - L - R) / 2 : L + (t - x_lo) / (x_hi - x_lo) * (W - L - R);
    };
    auto py = [&](double v) { return H - B - v / y_hi * (H - T - B); };

    const auto& [title, unit] = kLabels.at(figure);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
        << "</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    for (int t = x_lo; t <= x_hi; ++t) {
        out << "<text x=\"" << fmt(px(t), 1) << "\" y=\"" << H - B + 16
            << "\" text-anchor=\"middle\">" << t << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\">tenants</text>\n";
    for (int k = 0; k <= 5; ++k) {
        const double v = y_hi * k / 5;
        char label[32];
        std::snprintf(label, sizeof label, "%g", v);
        out << "<line x1=\"" << L - 4 << "\" y1=\"" << fmt(py(v), 1) << "\" x2=\"" << W - R
            << "\" y2=\"" << fmt(py(v), 1) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << L - 8 << "\" y=\"" << fmt(py(v) + 4, 1)
            << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">" << unit << "</text>\n";

    static const std::map<Method, const char*> kColor{{Method::jra, "#1f77b4"},
                                                      {Method::dra, "#d62728"}};
    int legend = 0;
    for (const auto& [m, series] : sums) {
        out << "<polyline fill=\"none\" stroke=\"" << kColor.at(m) << "\" stroke-width=\"2\" points=\"";
        for (const auto& [t, cell] : series) {
            out << fmt(px(t), 1) << ',' << fmt(py(cell.first / cell.second), 1) << ' ';
        }
        out << "\"/>\n";
        for (const auto& [t, cell] : series) {
            out << "<circle cx=\"" << fmt(px(t), 1) << "\" cy=\"" << fmt(py(cell.first / cell.second), 1)
                << "\" r=\"3\" fill=\"" << kColor.at(m) << "\"/>\n";
        }
        const double ly = T + 8 + 18 * legend++;
        out << "<line x1=\"" << W - R - 90 << "\" y1=\"" << ly << "\" x2=\"" << W - R - 70 << "\" y2=\""
            << ly << "\" stroke=\"" << kColor.at(m) << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << W - R - 64 << "\" y=\"" << ly + 4 << "\">" << to_string(m)
            << "</text>\n";
    }
    out << "</svg>\n";
}

void emit_svg(const std::vector<SweepRecord>& records, Figure figure,
              const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw HarnessError("cannot write " + path.string());
    }
    emit_svg(records, figure, out);
    if (!out) {
        throw HarnessError("error while writing " + path.string());
    }
}

} // namespace slicenet
