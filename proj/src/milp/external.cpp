#include "slicenet/milp/solver.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace slicenet::milp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string first_token(const std::string& command)
{
    std::istringstream in(command);
    std::string tok;
    in >> tok;
    return tok;
}

bool program_exists(const std::string& program)
{
    if (program.empty()) {
        return false;
    }
    if (program.find('/') != std::string::npos) {
        return fs::exists(program);
    }
    const char* path = std::getenv("PATH");
    if (path == nullptr) {
        return false;
    }
    std::istringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
        if (!dir.empty() && fs::exists(fs::path(dir) / program)) {
            return true;
        }
    }
    return false;
}

std::string quote(const std::string& s)
{
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

SolveStatus parse_status(const std::string& s)
{
    if (s == "optimal") {
        return SolveStatus::optimal;
    }
    if (s == "infeasible") {
        return SolveStatus::infeasible;
    }
    if (s == "unbounded") {
        return SolveStatus::unbounded;
    }
    if (s == "time_limit") {
        return SolveStatus::time_limit;
    }
    throw AdapterFailure("external solver reported unknown status '" + s + "'");
}

json bound_json(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

} // namespace

void write_model_json(const MilpModel& model, std::ostream& out)
{
    json j;
    json vars = json::array();
    for (const auto& v : model.variables()) {
        vars.push_back({{"name", v.name},
                        {"kind", v.kind == VarKind::binary ? "binary" : "continuous"},
                        {"lower", bound_json(v.lower)},
                        {"upper", bound_json(v.upper)}});
    }
    json rows = json::array();
    for (const auto& c : model.constraints()) {
        json terms = json::array();
        for (const auto& t : c.terms) {
            terms.push_back({t.var, t.coef});
        }
        rows.push_back({{"terms", terms},
                        {"relation", to_string(c.relation)},
                        {"rhs", c.rhs},
                        {"tag", c.tag}});
    }
    j["variables"] = std::move(vars);
    j["constraints"] = std::move(rows);
    j["objective"] = model.objective();
    j["offset"] = model.objective_offset();
    out << j.dump();
}

void write_lp_format(const MilpModel& model, std::ostream& out)
{
    const auto& vars = model.variables();
    auto term = [&](double coef, int var, bool first) {
        std::ostringstream s;
        if (coef < 0) {
            s << (first ? "-" : " - ");
        } else if (!first) {
            s << " + ";
        }
        s << std::abs(coef) << ' ' << vars[static_cast<std::size_t>(var)].name;
        return s.str();
    };

    out << "Minimize\n obj: ";
    bool first = true;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        if (model.objective()[j] != 0.0) {
            out << term(model.objective()[j], static_cast<int>(j), first);
            first = false;
        }
    }
    if (first) {
        out << "0";
    }
    out << "\nSubject To\n";
    std::size_t idx = 0;
    for (const auto& c : model.constraints()) {
        out << ' ' << (c.tag.empty() ? "r" + std::to_string(idx) : c.tag) << ": ";
        first = true;
        for (const auto& t : c.terms) {
            out << term(t.coef, t.var, first);
            first = false;
        }
        if (first) {
            out << "0";
        }
        out << ' ' << to_string(c.relation) << ' ' << c.rhs << '\n';
        ++idx;
    }
    out << "Bounds\n";
    for (const auto& v : vars) {
        if (v.kind == VarKind::continuous || v.lower == v.upper) {
            out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
        }
    }
    out << "Binaries\n";
    for (const auto& v : vars) {
        if (v.kind == VarKind::binary) {
            out << ' ' << v.name << '\n';
        }
    }
    out << "End\n";
}

ExternalSolver::ExternalSolver(std::string command) : command_(std::move(command))
{
    if (command_.empty()) {
        throw AdapterUnavailable("no external solver command configured");
    }
    const std::string program = first_token(command_);
    if (!program_exists(program)) {
        throw AdapterUnavailable("external solver program not found: " + program);
    }
}

std::string ExternalSolver::default_command()
{
    if (const char* env = std::getenv("SLICENET_EXTERNAL_SOLVER"); env != nullptr) {
        return env;
    }
#ifdef SLICENET_ADAPTER_SCRIPT
    if (fs::exists(SLICENET_ADAPTER_SCRIPT) && program_exists("python3")) {
        return std::string("python3 ") + quote(SLICENET_ADAPTER_SCRIPT);
    }
#endif
    return {};
}

MilpSolution ExternalSolver::solve(const MilpModel& model, const SolveOptions& options) const
{
    model.validate();
    static std::atomic<unsigned> counter{0};
    const fs::path dir = fs::temp_directory_path();
    const std::string stem = "slicenet-" + std::to_string(::getpid()) + "-"
        + std::to_string(counter.fetch_add(1));
    const fs::path in_path = dir / (stem + "-model.json");
    const fs::path out_path = dir / (stem + "-solution.json");
    {
        std::ofstream out(in_path);
        if (!out) {
            throw AdapterFailure("cannot write " + in_path.string());
        }
        write_model_json(model, out);
    }
    std::string cmd = command_ + " " + quote(in_path.string()) + " " + quote(out_path.string());
    if (std::isfinite(options.time_limit_s)) {
        cmd += " " + std::to_string(options.time_limit_s);
    }
    const int rc = std::system(cmd.c_str());
    fs::remove(in_path);
    if (rc != 0) {
        fs::remove(out_path);
        throw AdapterFailure("external solver exited with status " + std::to_string(rc));
    }
    std::ifstream in(out_path);
    if (!in) {
        throw AdapterFailure("external solver produced no solution file");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fs::remove(out_path);
        throw AdapterFailure(std::string("unreadable solution file: ") + e.what());
    }
    in.close();
    fs::remove(out_path);

    MilpSolution sol;
    sol.status = parse_status(j.at("status").get<std::string>());
    if (j.contains("values") && !j["values"].is_null()) {
        sol.assignment = j["values"].get<std::vector<double>>();
        if (sol.assignment.size() != model.variable_count()) {
            throw AdapterFailure("solution length does not match the model");
        }
        // HiGHS reports binaries within its own tolerance; snap them
        for (const auto& v : model.variables()) {
            if (v.kind == VarKind::binary) {
                auto& x = sol.assignment[static_cast<std::size_t>(v.id)];
                x = std::round(x);
            }
        }
        sol.has_incumbent = true;
        sol.objective_value = model.evaluate_objective(sol.assignment);
    }
    if (sol.status == SolveStatus::time_limit && !options.initial_solution.empty()
        && options.initial_solution.size() == model.variable_count()
        && model.max_violation(options.initial_solution) <= 1e-6) {
        const double z = model.evaluate_objective(options.initial_solution);
        if (!sol.has_incumbent || z < sol.objective_value) {
            sol.assignment = options.initial_solution;
            sol.objective_value = z;
            sol.has_incumbent = true;
        }
    }
    if (sol.status == SolveStatus::optimal) {
        sol.best_bound = sol.objective_value;
    }
    return sol;
}

MilpSolution solve(const MilpModel& model, const SolverConfig& config)
{
    if (config.kind == SolverKind::external) {
        return ExternalSolver(config.external_command).solve(model, config.options);
    }
    return solve_milp(model, config.options);
}

} // namespace slicenet::milp
