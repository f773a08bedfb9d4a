#pragma once

#include "slicenet/disjoint.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicenet {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    int node_count = 4;
    int tenant_min = 1;
    int tenant_max = 16;
    int slices_per_tenant = 1;
    int vms_per_slice = 3;
    VlShape vl_shape = VlShape::mesh;
    CostWeights weights;
    /// Per solve. Wall-clock limits make reruns machine-dependent; the node
    /// limit is the deterministic budget.
    double time_limit_s = milp::kInfinity;
    std::int64_t node_limit = 1000;
    int replications = 5;
    milp::SolverKind solver = milp::SolverKind::internal;
    std::string external_command;
    TopologyParams topology;
    SliceParams slices;

    /// Seed of replication r (0-based): topology and batches are drawn from it.
    std::uint64_t replication_seed(int r) const;
    milp::SolverConfig solver_config() const;
    void validate() const;
};

/// Missing keys keep their defaults; unknown keys are an error.
ScenarioConfig load_config_json(std::istream& in);
void write_config_json(const ScenarioConfig& config, std::ostream& out);

enum class Method { jra, dra };

const char* to_string(Method method);

struct SweepRecord {
    Method method = Method::jra;
    int tenants = 0;
    int replication = 0;
    double total_cost = 0.0;
    double beta = 0.0;
    double power = 0.0;  // W
    double acceptance_ratio = 0.0;
    int offered = 0;
    int rejected = 0;
    double wall_ms = 0.0;
    bool collapse = false;
    bool admission_limited = false;   // some admission round stopped on a limit
    bool allocation_limited = false;  // the allocation solve stopped on a limit
    /// DRA rows only: joint problem solved on the DRA-accepted set, seeded
    /// with the DRA solution.
    double joint_on_accepted = 0.0;
    bool joint_on_accepted_proven = false;
};

/// Runs AC-JRA + JRA and the DRA pipeline on the same batch for every tenant
/// count and replication. `progress`, when set, is called after each cell.
std::vector<SweepRecord> run_sweep(
    const ScenarioConfig& config,
    const std::function<void(const SweepRecord&)>& progress = nullptr);

/// method,tenants,replication,total_cost,beta,power_w,acceptance_ratio,
/// rejected,wall_ms,collapse,admission_limited,allocation_limited
/// Rows sorted by method, tenants, replication.
void emit_csv(const std::vector<SweepRecord>& records, std::ostream& out,
              bool include_wall_time = true);
void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path);

enum class Figure { cost, acceptance, rejected, beta, time };

const char* to_string(Figure figure);
Figure parse_figure(const std::string& name);

/// Line chart of the per-tenant-count mean, one series per method.
void emit_svg(const std::vector<SweepRecord>& records, Figure figure, std::ostream& out);
void emit_svg(const std::vector<SweepRecord>& records, Figure figure,
              const std::filesystem::path& path);

} // namespace slicenet
