#pragma once

#include "slicenet/milp/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicenet::milp {

enum class SolveStatus { optimal, infeasible, unbounded, time_limit };

const char* to_string(SolveStatus status);

struct MilpSolution {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> assignment;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    /// Proven lower bound on the optimum (equals objective_value when optimal).
    double best_bound = -std::numeric_limits<double>::infinity();
    bool has_incumbent = false;
    std::int64_t nodes = 0;
    std::int64_t lp_iterations = 0;

    double value(int var) const { return assignment.at(static_cast<std::size_t>(var)); }
};

struct SolveOptions {
    /// Wall-clock limit. Hitting it makes results timing-dependent; prefer
    /// node_limit where byte-identical reruns matter.
    double time_limit_s = std::numeric_limits<double>::infinity();
    /// Deterministic work limit on branch-and-bound nodes; negative = none.
    std::int64_t node_limit = -1;
    /// Nodes whose bound is within this of the incumbent are pruned.
    double absolute_gap = 1e-9;
    double relative_gap = 1e-9;
    /// LP-guided dive for an early incumbent at the root and periodically.
    bool diving = true;
    /// After branching, continue straight into one child until the subtree
    /// is pruned, then return to the best open bound.
    bool plunge = true;
    /// Optional per-variable branching priority (higher first). Missing
    /// entries count as 0.
    std::vector<int> branch_priority;
    /// Optional starting point; used as the first incumbent when it satisfies
    /// the model within tolerance, ignored otherwise.
    std::vector<double> initial_solution;
};

/// Continuous relaxation: binaries relaxed to [0,1].
MilpSolution solve_lp_relaxation(const MilpModel& model);

/// Branch-and-bound over the binary variables.
///
/// Branches on the most fractional binary (lowest id on ties) and explores
/// open nodes best-bound first, warm-starting every node LP from its
/// parent's basis. Deterministic for a given model and node_limit.
MilpSolution solve_milp(const MilpModel& model, const SolveOptions& options = {});

class AdapterUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AdapterFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bridge to an out-of-process MILP solver.
///
/// The model is written as JSON to a scratch file and `command` is run as
/// `command <model.json> <solution.json>`. The solution file carries
/// {"status": "optimal"|"infeasible"|"unbounded"|"time_limit",
///  "objective": number, "values": [number...]}.
class ExternalSolver {
public:
    /// Throws AdapterUnavailable when the command is empty or its program
    /// cannot be found, so misconfiguration shows up before any solve.
    explicit ExternalSolver(std::string command);

    MilpSolution solve(const MilpModel& model, const SolveOptions& options = {}) const;

    const std::string& command() const { return command_; }

    /// Command from $SLICENET_EXTERNAL_SOLVER, or the bundled scipy/HiGHS
    /// script when it exists next to the build; empty when neither is set.
    static std::string default_command();

private:
    std::string command_;
};

enum class SolverKind { internal, external };

/// What the higher layers hand around: which backend, with what limits.
struct SolverConfig {
    SolverKind kind = SolverKind::internal;
    SolveOptions options;
    std::string external_command;
};

MilpSolution solve(const MilpModel& model, const SolverConfig& config);

/// Model as JSON (schema used by the external adapter).
void write_model_json(const MilpModel& model, std::ostream& out);

/// Human-readable LP-style dump; constraint names carry the model tags.
void write_lp_format(const MilpModel& model, std::ostream& out);

} // namespace slicenet::milp
