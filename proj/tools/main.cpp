// slicenet command line: sweep, solve, admit, oracle.
//
// Exit codes: 0 ok, 1 usage or input error, 2 infeasible, 3 a solver limit
// was hit, 4 oracle mismatch.

#include "slicenet/harness.hpp"
#include "slicenet/oracle.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace slicenet;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kInfeasible = 2;
constexpr int kLimit = 3;
constexpr int kMismatch = 4;

struct SolverFlags {
    std::string kind = "internal";
    double time_limit = 0.0;  // 0 = none
    std::int64_t node_limit = -2;  // -2 = keep default
    std::string adapter;

    void add(CLI::App* app)
    {
        app->add_option("--solver", kind, "internal or adapter")
            ->check(CLI::IsMember({"internal", "adapter"}));
        app->add_option("--time-limit", time_limit, "seconds per solve (0 = none)")
            ->check(CLI::NonNegativeNumber);
        app->add_option("--node-limit", node_limit, "branch-and-bound nodes per solve (-1 = none)");
        app->add_option("--adapter-command", adapter, "command line of the external solver");
    }

    void apply(milp::SolverConfig& c) const
    {
        c.kind = kind == "adapter" ? milp::SolverKind::external : milp::SolverKind::internal;
        if (time_limit > 0) {
            c.options.time_limit_s = time_limit;
        }
        if (node_limit != -2) {
            c.options.node_limit = node_limit;
        }
        if (!adapter.empty()) {
            c.external_command = adapter;
        }
    }
};

template <class T, class Load>
T load_file(const std::string& path, Load load)
{
    std::ifstream in(path);
    if (!in) {
        throw HarnessError("cannot open " + path);
    }
    try {
        return load(in);
    } catch (const std::exception& e) {
        throw HarnessError(path + ": " + e.what());
    }
}

int run_sweep_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                      std::optional<int> replications, std::optional<int> tenant_max,
                      std::string out_dir, const SolverFlags& flags)
{
    ScenarioConfig config;
    if (!config_path.empty()) {
        config = load_file<ScenarioConfig>(config_path, load_config_json);
    }
    if (seed) {
        config.seed = *seed;
    }
    if (replications) {
        config.replications = *replications;
    }
    if (tenant_max) {
        config.tenant_max = *tenant_max;
    }
    milp::SolverConfig sc = config.solver_config();
    flags.apply(sc);
    config.solver = sc.kind;
    config.time_limit_s = sc.options.time_limit_s;
    config.node_limit = sc.options.node_limit;
    config.external_command = sc.external_command;
    config.validate();

    if (const char* env = std::getenv("SLICENET_OUT_DIR"); env != nullptr && *env != '\0') {
        out_dir = env;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw HarnessError("cannot create " + out_dir + ": " + ec.message());
    }

    const auto records = run_sweep(config, [](const SweepRecord& r) {
        std::cerr << to_string(r.method) << " T=" << r.tenants << " rep=" << r.replication
                  << " cost=" << r.total_cost << " accepted=" << r.offered - r.rejected << "/"
                  << r.offered << " " << static_cast<long>(r.wall_ms) << "ms"
                  << (r.admission_limited || r.allocation_limited ? " (limited)" : "") << '\n';
    });

    const fs::path dir(out_dir);
    emit_csv(records, dir / "sweep.csv");
    {
        std::ofstream cfg(dir / "config.json");
        write_config_json(config, cfg);
    }
    for (const Figure f :
         {Figure::cost, Figure::acceptance, Figure::rejected, Figure::beta, Figure::time}) {
        emit_svg(records, f, dir / (std::string(to_string(f)) + ".svg"));
    }
    std::cout << "wrote " << records.size() << " records to " << (dir / "sweep.csv").string()
              << '\n';
    for (const auto& r : records) {
        if (r.admission_limited || r.allocation_limited) {
            std::cerr << "some cells stopped on a solver limit\n";
            return kLimit;
        }
    }
    return kOk;
}

int run_solve_command(const std::string& network_path, const std::string& slices_path,
                      const std::string& method, const SolverFlags& flags)
{
    const PhysicalNetwork network = load_file<PhysicalNetwork>(network_path, load_topology_json);
    const RequestBatch batch = load_file<RequestBatch>(slices_path, load_batch_json);
    milp::SolverConfig sc;
    flags.apply(sc);
    const CostWeights weights;

    if (method == "dra") {
        const DisjointResult r = run_dra_pipeline(network, batch, weights, sc);
        write_disjoint_json(r, network, batch, std::cout);
        return r.limited ? kLimit : kOk;
    }
    const Formulation f = build_jra_model(network, batch, weights);
    sc.options.branch_priority = branch_priority(f);
    sc.options.initial_solution = encode_placement(f, greedy_placement(network, batch));
    const milp::MilpSolution sol = milp::solve(f.model, sc);
    if (!sol.has_incumbent) {
        std::cerr << "no feasible allocation (" << milp::to_string(sol.status) << ")\n";
        return sol.status == milp::SolveStatus::time_limit ? kLimit : kInfeasible;
    }
    const auto [placement, cost] = decode_and_cost(f, sol, network, batch, weights);
    write_placement_json(placement, cost, network, batch, std::cout);
    return sol.status == milp::SolveStatus::time_limit ? kLimit : kOk;
}

int run_admit_command(const std::string& network_path, const std::string& slices_path,
                      const std::string& mode, const SolverFlags& flags)
{
    const PhysicalNetwork network = load_file<PhysicalNetwork>(network_path, load_topology_json);
    const RequestBatch batch = load_file<RequestBatch>(slices_path, load_batch_json);
    milp::SolverConfig sc;
    flags.apply(sc);
    const AdmissionOutcome outcome =
        mode == "dma" ? run_ac_dma(network, batch, sc) : run_ac_jra(network, batch, sc);
    write_admission_json(outcome, std::cout);
    return outcome.limited ? kLimit : kOk;
}

int run_oracle_command(std::uint64_t seed, int instances, int max_nodes, int max_slices,
                       int max_vms, const SolverFlags& flags)
{
    milp::SolverConfig sc;
    flags.apply(sc);
    const oracle::CrossCheck r =
        oracle::cross_check(seed, instances, max_nodes, max_slices, max_vms, sc);
    for (const auto& f : r.failures) {
        std::cerr << "MISMATCH " << f << '\n';
    }
    std::cout << r.instances << " instances, " << r.solves << " solves (" << r.feasible
              << " feasible), " << r.failures.size()
              << " mismatches\n";
    return r.failures.empty() ? kOk : kMismatch;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Network slice allocation and admission control"};
    app.require_subcommand(1);

    SolverFlags flags;

    auto* sweep = app.add_subcommand("sweep", "run the tenant sweep, write CSV and SVG plots");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<int> tenant_max;
    std::string out_dir = "results";
    sweep->add_option("--config", config_path, "scenario JSON")->check(CLI::ExistingFile);
    sweep->add_option("--seed", seed, "base seed");
    sweep->add_option("--replications", replications)->check(CLI::PositiveNumber);
    sweep->add_option("--tenants", tenant_max, "largest tenant count")->check(CLI::PositiveNumber);
    sweep->add_option("--out", out_dir, "output directory (SLICENET_OUT_DIR overrides)");
    flags.add(sweep);

    std::string network_path;
    std::string slices_path;
    auto* solve = app.add_subcommand("solve", "allocate one batch, print the placement JSON");
    std::string method = "jra";
    solve->add_option("--network", network_path)->required()->check(CLI::ExistingFile);
    solve->add_option("--slices", slices_path)->required()->check(CLI::ExistingFile);
    solve->add_option("--method", method, "jra (no admission) or dra (full pipeline)")
        ->check(CLI::IsMember({"jra", "dra"}));
    flags.add(solve);

    auto* admit = app.add_subcommand("admit", "run admission control only");
    std::string mode = "jra";
    admit->add_option("--network", network_path)->required()->check(CLI::ExistingFile);
    admit->add_option("--slices", slices_path)->required()->check(CLI::ExistingFile);
    admit->add_option("--mode", mode, "jra or dma")->check(CLI::IsMember({"jra", "dma"}));
    flags.add(admit);

    auto* oracle_cmd = app.add_subcommand("oracle", "cross-check the solver on tiny instances");
    std::uint64_t oracle_seed = 1;
    int instances = 200;
    int max_nodes = 2;
    int max_slices = 2;
    int max_vms = 2;
    oracle_cmd->add_option("--seed", oracle_seed);
    oracle_cmd->add_option("--instances", instances)->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--max-nodes", max_nodes)->check(CLI::Range(1, 3));
    oracle_cmd->add_option("--max-slices", max_slices)->check(CLI::Range(1, 3));
    oracle_cmd->add_option("--max-vms", max_vms)->check(CLI::Range(1, 3));
    flags.add(oracle_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*sweep) {
            return run_sweep_command(config_path, seed, replications, tenant_max, out_dir, flags);
        }
        if (*solve) {
            return run_solve_command(network_path, slices_path, method, flags);
        }
        if (*admit) {
            return run_admit_command(network_path, slices_path, mode, flags);
        }
        return run_oracle_command(oracle_seed, instances, max_nodes, max_slices, max_vms, flags);
    } catch (const InfeasibleAfterAdmission& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const HarnessError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
}
