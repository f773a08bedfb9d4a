#include "slicenet/milp/simplex.hpp"
#include "slicenet/milp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

namespace slicenet::milp {

namespace {

constexpr double kIntegralityTol = 1e-6;
constexpr double kFeasibilityTol = 1e-6;
constexpr std::int64_t kDiveEvery = 256;

using Clock = std::chrono::steady_clock;

struct Fixing {
    int var = 0;
    double value = 0.0;
    std::shared_ptr<const Fixing> parent;
};

struct Node {
    double bound = 0.0;
    std::int64_t seq = 0;
    std::int64_t parent_seq = -1;
    std::shared_ptr<const Fixing> fixings;
    std::shared_ptr<const BasisState> basis;
};

// Lowest bound first; among equal bounds the newest node, which keeps the
// search plunging instead of sweeping a level at a time.
struct WorseNode {
    bool operator()(const Node& a, const Node& b) const
    {
        if (a.bound != b.bound) {
            return a.bound > b.bound;
        }
        return a.seq < b.seq;
    }
};

class BranchAndBound {
public:
    BranchAndBound(const MilpModel& model, const SolveOptions& options)
        : model_(model), options_(options), lp_(model), start_(Clock::now())
    {
        for (const auto& v : model.variables()) {
            root_lo_.push_back(v.lower);
            root_hi_.push_back(v.upper);
            if (v.kind == VarKind::binary) {
                binaries_.push_back(v.id);
            } else {
                has_continuous_ = true;
            }
        }
    }

    MilpSolution run()
    {
        MilpSolution out;
        if (options_.initial_solution.size() == model_.variable_count()) {
            offer(options_.initial_solution);
        }
        const LpStatus root = lp_.solve();
        ++nodes_;
        if (root == LpStatus::infeasible) {
            out.status = SolveStatus::infeasible;
            return finish(out);
        }
        if (root == LpStatus::unbounded) {
            out.status = SolveStatus::unbounded;
            return finish(out);
        }
        if (root == LpStatus::iteration_limit) {
            out.status = SolveStatus::time_limit;
            return finish(out);
        }

        std::priority_queue<Node, std::vector<Node>, WorseNode> open;
        double stop_bound = -kInfinity;
        bool limited = false;

        // root is processed inline; children carry its basis
        Node current{lp_.objective(), seq_++, -1, nullptr, nullptr};
        bool have_current = true;
        bool current_solved = true;
        std::int64_t lp_holds = current.seq;

        for (;;) {
            if (!have_current) {
                if (open.empty()) {
                    break;
                }
                current = open.top();
                open.pop();
                if (current.bound >= cutoff()) {
                    continue;
                }
                current_solved = false;
            }
            have_current = false;
            if (out_of_budget()) {
                stop_bound = current.bound;
                limited = true;
                break;
            }

            if (!current_solved) {
                apply(current.fixings);
                if (lp_holds != current.parent_seq) {
                    lp_.load_basis(*current.basis);
                }
                const LpStatus st = lp_.solve();
                ++nodes_;
                lp_holds = current.seq;
                if (st == LpStatus::infeasible) {
                    continue;
                }
                if (st != LpStatus::optimal) {
                    // numerically stuck node
                    continue;
                }
            }
            const double bound = lp_.objective();
            if (bound >= cutoff()) {
                continue;
            }
            std::vector<double> x = lp_.primal();
            int branch = most_fractional(x, kIntegralityTol);
            if (branch < 0) {
                if (try_incumbent(x, current.fixings)) {
                    lp_holds = -1;
                    continue;
                }
                lp_holds = -1;
                branch = most_fractional(x, 1e-12);
                if (branch < 0) {
                    continue;
                }
            }
            if (options_.diving && (nodes_ == 1 || nodes_ % kDiveEvery == 0)) {
                dive(current.fixings);
                lp_holds = -1;
                if (bound >= cutoff()) {
                    continue;
                }
            }

            auto basis = std::make_shared<const BasisState>(lp_.basis());
            if (lp_holds != current.seq) {
                // dive or polish disturbed the basis; the stored copy is stale
                apply(current.fixings);
                lp_.load_basis(*basis);
            }
            const double frac = x[static_cast<std::size_t>(branch)];
            const double later = frac >= 0.5 ? 0.0 : 1.0;
            Node children[2];
            for (int c = 0; c < 2; ++c) {
                const double v = c == 0 ? later : 1.0 - later;
                children[c].bound = bound;
                children[c].seq = seq_++;
                children[c].parent_seq = current.seq;
                children[c].fixings =
                    std::make_shared<const Fixing>(Fixing{branch, v, current.fixings});
                children[c].basis = basis;
            }
            lp_holds = current.seq;
            open.push(std::move(children[0]));
            if (options_.plunge) {
                current = std::move(children[1]);
                have_current = true;
                current_solved = false;
            } else {
                open.push(std::move(children[1]));
            }
        }

        if (limited) {
            double b = stop_bound;
            while (!open.empty()) {
                b = std::min(b, open.top().bound);
                open.pop();
            }
            out.status = SolveStatus::time_limit;
            out.best_bound = has_incumbent_ ? std::min(b, incumbent_value_) : b;
        } else if (has_incumbent_) {
            out.status = SolveStatus::optimal;
            out.best_bound = incumbent_value_;
        } else {
            out.status = SolveStatus::infeasible;
        }
        return finish(out);
    }

private:
    MilpSolution finish(MilpSolution& out)
    {
        out.nodes = nodes_;
        out.lp_iterations = lp_.iterations();
        if (has_incumbent_) {
            out.has_incumbent = true;
            out.assignment = incumbent_;
            out.objective_value = incumbent_value_;
        }
        return out;
    }

    double cutoff() const
    {
        if (!has_incumbent_) {
            return kInfinity;
        }
        return incumbent_value_ - options_.absolute_gap
            - options_.relative_gap * std::abs(incumbent_value_);
    }

    bool out_of_budget() const
    {
        if (options_.node_limit >= 0 && nodes_ >= options_.node_limit) {
            return true;
        }
        if (std::isfinite(options_.time_limit_s)) {
            const std::chrono::duration<double> elapsed = Clock::now() - start_;
            return elapsed.count() >= options_.time_limit_s;
        }
        return false;
    }

    void apply(const std::shared_ptr<const Fixing>& fixings)
    {
        for (int j : touched_) {
            const auto jj = static_cast<std::size_t>(j);
            lp_.set_bounds(j, root_lo_[jj], root_hi_[jj]);
        }
        touched_.clear();
        for (const Fixing* f = fixings.get(); f != nullptr; f = f->parent.get()) {
            lp_.set_bounds(f->var, f->value, f->value);
            touched_.push_back(f->var);
        }
    }

    // Most fractional binary within the highest priority class that has one;
    // lowest id on ties.
    int most_fractional(const std::vector<double>& x, double tol) const
    {
        int best = -1;
        int best_prio = 0;
        double best_frac = tol;
        for (int j : binaries_) {
            const double v = x[static_cast<std::size_t>(j)];
            const double f = std::min(v - std::floor(v), std::ceil(v) - v);
            if (f <= tol + 1e-12) {
                continue;
            }
            const int prio = priority(j);
            if (best < 0 || prio > best_prio || (prio == best_prio && f > best_frac + 1e-12)) {
                best = j;
                best_prio = prio;
                best_frac = f;
            }
        }
        return best;
    }

    int priority(int j) const
    {
        const auto& p = options_.branch_priority;
        return static_cast<std::size_t>(j) < p.size() ? p[static_cast<std::size_t>(j)] : 0;
    }

    // Rounds binaries, re-solves for the continuous part when needed, and
    // keeps the point if it satisfies the model within tolerance.
    bool try_incumbent(std::vector<double> x, const std::shared_ptr<const Fixing>& fixings)
    {
        for (int j : binaries_) {
            auto& v = x[static_cast<std::size_t>(j)];
            v = std::round(v);
        }
        if (has_continuous_) {
            for (int j : binaries_) {
                const double v = x[static_cast<std::size_t>(j)];
                lp_.set_bounds(j, v, v);
            }
            const LpStatus st = lp_.solve();
            if (st == LpStatus::optimal) {
                const auto cont = lp_.primal();
                for (const auto& v : model_.variables()) {
                    if (v.kind == VarKind::continuous) {
                        const auto j = static_cast<std::size_t>(v.id);
                        x[j] = std::clamp(cont[j], v.lower, v.upper);
                    }
                }
            }
            for (int j : binaries_) {
                const auto jj = static_cast<std::size_t>(j);
                lp_.set_bounds(j, root_lo_[jj], root_hi_[jj]);
            }
            touched_.clear();
            apply(fixings);
            if (st != LpStatus::optimal) {
                return false;
            }
        }
        return offer(std::move(x));
    }

    bool offer(std::vector<double> x)
    {
        if (model_.max_violation(x) > kFeasibilityTol
            || model_.max_integrality_violation(x) > kIntegralityTol) {
            return false;
        }
        const double z = model_.evaluate_objective(x);
        if (!has_incumbent_ || z < incumbent_value_) {
            incumbent_ = std::move(x);
            incumbent_value_ = z;
            has_incumbent_ = true;
        }
        return true;
    }

    // Fractional diving: repeatedly round the binary closest to integrality
    // and re-solve, flipping once on infeasibility.
    void dive(const std::shared_ptr<const Fixing>& node_fixings)
    {
        const BasisState saved = lp_.basis();
        auto fixings = node_fixings;
        const std::size_t max_steps = binaries_.size() + 1;
        for (std::size_t step = 0; step < max_steps; ++step) {
            if (out_of_budget()) {
                break;
            }
            std::vector<double> x = lp_.primal();
            int pick = -1;
            double pick_frac = 1.0;
            for (int j : binaries_) {
                const double v = x[static_cast<std::size_t>(j)];
                const double f = std::min(v - std::floor(v), std::ceil(v) - v);
                if (f > kIntegralityTol && f < pick_frac - 1e-12) {
                    pick_frac = f;
                    pick = j;
                }
            }
            if (pick < 0) {
                try_incumbent(std::move(x), fixings);
                break;
            }
            const double target = std::round(x[static_cast<std::size_t>(pick)]);
            bool ok = false;
            for (const double v : {target, 1.0 - target}) {
                lp_.set_bounds(pick, v, v);
                touched_.push_back(pick);
                const LpStatus st = lp_.solve();
                if (st == LpStatus::optimal && lp_.objective() < cutoff()) {
                    fixings = std::make_shared<const Fixing>(Fixing{pick, v, fixings});
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                break;
            }
        }
        apply(node_fixings);
        lp_.load_basis(saved);
    }

    const MilpModel& model_;
    SolveOptions options_;
    LpSolver lp_;
    Clock::time_point start_;

    std::vector<double> root_lo_;
    std::vector<double> root_hi_;
    std::vector<int> binaries_;
    bool has_continuous_ = false;
    std::vector<int> touched_;

    std::vector<double> incumbent_;
    double incumbent_value_ = kInfinity;
    bool has_incumbent_ = false;

    std::int64_t nodes_ = 0;
    std::int64_t seq_ = 0;
};

} // namespace

const char* to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::infeasible:
        return "infeasible";
    case SolveStatus::unbounded:
        return "unbounded";
    case SolveStatus::time_limit:
        return "time_limit";
    }
    return "?";
}

MilpSolution solve_lp_relaxation(const MilpModel& model)
{
    LpSolver lp(model);
    const LpStatus st = lp.solve();
    MilpSolution out;
    out.nodes = 1;
    out.lp_iterations = lp.iterations();
    switch (st) {
    case LpStatus::optimal:
        out.status = SolveStatus::optimal;
        out.assignment = lp.primal();
        out.objective_value = lp.objective();
        out.best_bound = out.objective_value;
        out.has_incumbent = true;
        break;
    case LpStatus::infeasible:
        out.status = SolveStatus::infeasible;
        break;
    case LpStatus::unbounded:
        out.status = SolveStatus::unbounded;
        break;
    case LpStatus::iteration_limit:
        out.status = SolveStatus::time_limit;
        break;
    }
    return out;
}

MilpSolution solve_milp(const MilpModel& model, const SolveOptions& options)
{
    BranchAndBound bb(model, options);
    return bb.run();
}

} // namespace slicenet::milp
