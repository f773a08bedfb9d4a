#include "slicenet/milp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slicenet::milp {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr std::size_t kRefactorEvery = 100;
constexpr int kDegenerateRunBeforeBland = 50;
constexpr double kCostPerturbation = 1e-6;

} // namespace

const char* to_string(LpStatus status)
{
    switch (status) {
    case LpStatus::optimal:
        return "optimal";
    case LpStatus::infeasible:
        return "infeasible";
    case LpStatus::unbounded:
        return "unbounded";
    case LpStatus::iteration_limit:
        return "iteration_limit";
    }
    return "?";
}

LpSolver::LpSolver(const MilpModel& model)
    : n_(model.variable_count()), m_(model.constraint_count())
{
    model.validate();
    scale(model);

    const std::size_t total = n_ + m_;
    lo_.assign(total, 0.0);
    hi_.assign(total, 0.0);
    cost_.assign(total, 0.0);
    x_.assign(total, 0.0);
    state_.assign(total, kAtLower);
    pos_.assign(total, -1);
    basic_.resize(m_);

    const auto& vars = model.variables();
    for (std::size_t j = 0; j < n_; ++j) {
        lo_[j] = vars[j].lower / col_scale_[j];
        hi_[j] = vars[j].upper / col_scale_[j];
        cost_[j] = model.objective()[j] * col_scale_[j];
    }
    const auto& rows = model.constraints();
    for (std::size_t i = 0; i < m_; ++i) {
        const double b = rows[i].rhs * row_scale_[i];
        switch (rows[i].relation) {
        case Relation::less_equal:
            lo_[n_ + i] = -kInfinity;
            hi_[n_ + i] = b;
            break;
        case Relation::greater_equal:
            lo_[n_ + i] = b;
            hi_[n_ + i] = kInfinity;
            break;
        case Relation::equal:
            lo_[n_ + i] = b;
            hi_[n_ + i] = b;
            break;
        }
    }
    for (std::size_t k = 0; k < total; ++k) {
        place_nonbasic(static_cast<int>(k));
    }
    for (std::size_t i = 0; i < m_; ++i) {
        basic_[i] = static_cast<int>(n_ + i);
        state_[n_ + i] = kBasic;
        pos_[n_ + i] = static_cast<int>(i);
    }
    offset_ = model.objective_offset();
}

void LpSolver::scale(const MilpModel& model)
{
    const auto& rows = model.constraints();
    const auto& vars = model.variables();

    std::vector<int> counts(n_ + 1, 0);
    for (const auto& row : rows) {
        for (const auto& t : row.terms) {
            ++counts[static_cast<std::size_t>(t.var) + 1];
        }
    }
    std::partial_sum(counts.begin(), counts.end(), counts.begin());
    col_start_ = counts;
    row_idx_.assign(static_cast<std::size_t>(col_start_.back()), 0);
    val_.assign(static_cast<std::size_t>(col_start_.back()), 0.0);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& t : rows[i].terms) {
            const auto at = static_cast<std::size_t>(fill[static_cast<std::size_t>(t.var)]++);
            row_idx_[at] = static_cast<int>(i);
            val_[at] = t.coef;
        }
    }

    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);

    // Geometric passes, then equilibrate rows so the largest entry is 1.
    // Binary columns keep unit scale so their bounds stay {0,1}.
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> rmin(m_, kInfinity), rmax(m_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
                const auto i = static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(p)]);
                const double a = std::abs(val_[static_cast<std::size_t>(p)]) * col_scale_[j];
                rmin[i] = std::min(rmin[i], a);
                rmax[i] = std::max(rmax[i], a);
            }
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (rmax[i] > 0.0) {
                row_scale_[i] = pass == 2 ? 1.0 / rmax[i] : 1.0 / std::sqrt(rmin[i] * rmax[i]);
            }
        }
        if (pass == 2) {
            break;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (vars[j].kind == VarKind::binary) {
                continue;
            }
            double cmin = kInfinity, cmax = 0.0;
            for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
                const auto i = static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(p)]);
                const double a = std::abs(val_[static_cast<std::size_t>(p)]) * row_scale_[i];
                cmin = std::min(cmin, a);
                cmax = std::max(cmax, a);
            }
            if (cmax > 0.0) {
                col_scale_[j] = 1.0 / std::sqrt(cmin * cmax);
            }
        }
    }
    for (std::size_t j = 0; j < n_; ++j) {
        for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
            const auto at = static_cast<std::size_t>(p);
            val_[at] *= row_scale_[static_cast<std::size_t>(row_idx_[at])] * col_scale_[j];
        }
    }
}

void LpSolver::place_nonbasic(int k)
{
    const auto kk = static_cast<std::size_t>(k);
    const bool want_upper = state_[kk] == kAtUpper;
    if (std::isfinite(lo_[kk]) && (!want_upper || !std::isfinite(hi_[kk]))) {
        state_[kk] = kAtLower;
        x_[kk] = lo_[kk];
    } else if (std::isfinite(hi_[kk])) {
        state_[kk] = kAtUpper;
        x_[kk] = hi_[kk];
    } else {
        state_[kk] = kFreeZero;
        x_[kk] = 0.0;
    }
}

void LpSolver::set_bounds(int var, double lower, double upper)
{
    const auto j = static_cast<std::size_t>(var);
    lo_[j] = lower / col_scale_[j];
    hi_[j] = upper / col_scale_[j];
    if (state_[j] != kBasic) {
        place_nonbasic(var);
        values_valid_ = false;
    }
}

double LpSolver::lower(int var) const
{
    const auto j = static_cast<std::size_t>(var);
    return lo_[j] * col_scale_[j];
}

double LpSolver::upper(int var) const
{
    const auto j = static_cast<std::size_t>(var);
    return hi_[j] * col_scale_[j];
}

double LpSolver::objective() const
{
    double z = offset_;
    for (std::size_t j = 0; j < n_; ++j) {
        z += cost_[j] * x_[j];
    }
    return z;
}

double LpSolver::value(int var) const
{
    const auto j = static_cast<std::size_t>(var);
    return x_[j] * col_scale_[j];
}

std::vector<double> LpSolver::primal() const
{
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        out[j] = x_[j] * col_scale_[j];
    }
    return out;
}

BasisState LpSolver::basis() const
{
    BasisState s;
    s.basic = basic_;
    s.at_upper.resize(state_.size());
    for (std::size_t k = 0; k < state_.size(); ++k) {
        s.at_upper[k] = state_[k] == kAtUpper ? 1 : 0;
    }
    return s;
}

void LpSolver::load_basis(const BasisState& s)
{
    std::fill(pos_.begin(), pos_.end(), -1);
    for (std::size_t k = 0; k < state_.size(); ++k) {
        state_[k] = s.at_upper[k] != 0 ? kAtUpper : kAtLower;
    }
    basic_ = s.basic;
    for (std::size_t p = 0; p < m_; ++p) {
        const auto k = static_cast<std::size_t>(basic_[p]);
        state_[k] = kBasic;
        pos_[k] = static_cast<int>(p);
    }
    for (std::size_t k = 0; k < state_.size(); ++k) {
        if (state_[k] != kBasic) {
            place_nonbasic(static_cast<int>(k));
        }
    }
    factor_valid_ = false;
    values_valid_ = false;
}

void LpSolver::column(int k, std::vector<double>& out) const
{
    std::fill(out.begin(), out.end(), 0.0);
    const auto kk = static_cast<std::size_t>(k);
    if (kk < n_) {
        for (int p = col_start_[kk]; p < col_start_[kk + 1]; ++p) {
            out[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(p)])] =
                val_[static_cast<std::size_t>(p)];
        }
    } else {
        out[kk - n_] = -1.0;
    }
}

double LpSolver::dot_column(int k, const std::vector<double>& y) const
{
    const auto kk = static_cast<std::size_t>(k);
    if (kk >= n_) {
        return -y[kk - n_];
    }
    double s = 0.0;
    for (int p = col_start_[kk]; p < col_start_[kk + 1]; ++p) {
        s += y[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(p)])]
            * val_[static_cast<std::size_t>(p)];
    }
    return s;
}

// B^{-1} = E_k ... E_1 (-I); the all-logical basis is -I.
void LpSolver::ftran(std::vector<double>& v) const
{
    for (auto& e : v) {
        e = -e;
    }
    for (const auto& eta : etas_) {
        const auto p = static_cast<std::size_t>(eta.pos);
        if (v[p] == 0.0) {
            continue;
        }
        const double vp = v[p] / eta.pivot;
        v[p] = vp;
        for (std::size_t t = 0; t < eta.idx.size(); ++t) {
            v[static_cast<std::size_t>(eta.idx[t])] -= eta.val[t] * vp;
        }
    }
}

void LpSolver::btran(std::vector<double>& v) const
{
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        const auto p = static_cast<std::size_t>(it->pos);
        double s = v[p];
        for (std::size_t t = 0; t < it->idx.size(); ++t) {
            s -= it->val[t] * v[static_cast<std::size_t>(it->idx[t])];
        }
        v[p] = s / it->pivot;
    }
    for (auto& e : v) {
        e = -e;
    }
}

void LpSolver::push_eta(const std::vector<double>& alpha, int pos)
{
    Eta eta;
    eta.pos = pos;
    eta.pivot = alpha[static_cast<std::size_t>(pos)];
    for (std::size_t i = 0; i < m_; ++i) {
        if (static_cast<int>(i) != pos && std::abs(alpha[i]) > 1e-13) {
            eta.idx.push_back(static_cast<int>(i));
            eta.val.push_back(alpha[i]);
        }
    }
    eta_nnz_ += eta.idx.size() + 1;
    etas_.push_back(std::move(eta));
}

void LpSolver::refactor()
{
    etas_.clear();
    eta_nnz_ = 0;
    updates_since_refactor_ = 0;

    std::vector<char> free_pos(m_, 1);
    std::vector<int> structural;
    for (std::size_t p = 0; p < m_; ++p) {
        const auto k = static_cast<std::size_t>(basic_[p]);
        if (k >= n_) {
            free_pos[k - n_] = 0;
        } else {
            structural.push_back(static_cast<int>(k));
        }
    }
    std::stable_sort(structural.begin(), structural.end(), [&](int a, int b) {
        const auto na = col_start_[static_cast<std::size_t>(a) + 1]
            - col_start_[static_cast<std::size_t>(a)];
        const auto nb = col_start_[static_cast<std::size_t>(b) + 1]
            - col_start_[static_cast<std::size_t>(b)];
        return na < nb;
    });

    std::vector<int> new_basic(m_, -1);
    for (std::size_t i = 0; i < m_; ++i) {
        if (!free_pos[i]) {
            new_basic[i] = static_cast<int>(n_ + i);
        }
    }
    std::fill(pos_.begin(), pos_.end(), -1);

    std::vector<double> a(m_);
    for (int j : structural) {
        column(j, a);
        ftran(a);
        double amax = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (free_pos[i]) {
                amax = std::max(amax, std::abs(a[i]));
            }
        }
        if (amax < kPivotTol) {
            // dependent column: leave it out, a logical takes its slot below
            state_[static_cast<std::size_t>(j)] = kAtLower;
            place_nonbasic(j);
            continue;
        }
        // sparsest acceptable pivot row keeps the eta file small
        int p = -1;
        for (std::size_t i = 0; i < m_; ++i) {
            if (free_pos[i] && std::abs(a[i]) >= 0.1 * amax) {
                p = static_cast<int>(i);
                break;
            }
        }
        push_eta(a, p);
        free_pos[static_cast<std::size_t>(p)] = 0;
        new_basic[static_cast<std::size_t>(p)] = j;
    }
    for (std::size_t i = 0; i < m_; ++i) {
        if (new_basic[i] < 0) {
            new_basic[i] = static_cast<int>(n_ + i);
        }
    }
    basic_ = std::move(new_basic);
    for (std::size_t p = 0; p < m_; ++p) {
        const auto k = static_cast<std::size_t>(basic_[p]);
        state_[k] = kBasic;
        pos_[k] = static_cast<int>(p);
    }
    factor_valid_ = true;
    values_valid_ = false;
}

void LpSolver::compute_basic_values()
{
    std::vector<double> v(m_, 0.0);
    for (std::size_t k = 0; k < n_ + m_; ++k) {
        if (state_[k] == kBasic || x_[k] == 0.0) {
            continue;
        }
        if (k < n_) {
            for (int p = col_start_[k]; p < col_start_[k + 1]; ++p) {
                v[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(p)])] -=
                    val_[static_cast<std::size_t>(p)] * x_[k];
            }
        } else {
            v[k - n_] += x_[k];
        }
    }
    ftran(v);
    for (std::size_t p = 0; p < m_; ++p) {
        x_[static_cast<std::size_t>(basic_[p])] = v[p];
    }
    values_valid_ = true;
}

double LpSolver::infeasibility(int k) const
{
    const auto kk = static_cast<std::size_t>(k);
    return std::max({0.0, lo_[kk] - x_[kk], x_[kk] - hi_[kk]});
}

bool LpSolver::primal_feasible() const
{
    for (int k : basic_) {
        if (infeasibility(k) > kPrimalTol) {
            return false;
        }
    }
    return true;
}

void LpSolver::compute_duals(bool phase_one)
{
    y_.assign(m_, 0.0);
    for (std::size_t p = 0; p < m_; ++p) {
        const auto k = static_cast<std::size_t>(basic_[p]);
        if (phase_one) {
            if (x_[k] < lo_[k] - kPrimalTol) {
                y_[p] = -1.0;
            } else if (x_[k] > hi_[k] + kPrimalTol) {
                y_[p] = 1.0;
            }
        } else {
            y_[p] = cost_[k];
        }
    }
    btran(y_);
    d_.assign(n_ + m_, 0.0);
    for (std::size_t k = 0; k < n_ + m_; ++k) {
        if (state_[k] != kBasic) {
            d_[k] = (phase_one ? 0.0 : cost_[k]) - dot_column(static_cast<int>(k), y_);
        }
    }
}

bool LpSolver::dual_feasible() const
{
    for (std::size_t k = 0; k < n_ + m_; ++k) {
        if (state_[k] == kBasic || lo_[k] == hi_[k]) {
            continue;
        }
        if ((state_[k] == kAtLower && d_[k] < -kDualTol)
            || (state_[k] == kAtUpper && d_[k] > kDualTol)
            || (state_[k] == kFreeZero && std::abs(d_[k]) > kDualTol)) {
            return false;
        }
    }
    return true;
}

void LpSolver::pivot(int q, int r, const std::vector<double>& alpha, double step, int dir,
                     bool leave_at_upper)
{
    const auto qq = static_cast<std::size_t>(q);
    x_[qq] += dir * step;
    for (std::size_t p = 0; p < m_; ++p) {
        if (alpha[p] != 0.0) {
            x_[static_cast<std::size_t>(basic_[p])] -= dir * step * alpha[p];
        }
    }
    const auto leaving = static_cast<std::size_t>(basic_[static_cast<std::size_t>(r)]);
    state_[leaving] = leave_at_upper ? kAtUpper : kAtLower;
    x_[leaving] = leave_at_upper ? hi_[leaving] : lo_[leaving];
    pos_[leaving] = -1;
    basic_[static_cast<std::size_t>(r)] = q;
    state_[qq] = kBasic;
    pos_[qq] = r;
    push_eta(alpha, r);
    ++updates_since_refactor_;
}

LpStatus LpSolver::run_primal(std::int64_t limit)
{
    std::vector<double> alpha(m_);
    int degenerate_run = 0;
    bool bland = false;
    for (;;) {
        if (total_iterations_ >= limit) {
            return LpStatus::iteration_limit;
        }
        if (updates_since_refactor_ >= kRefactorEvery) {
            refactor();
            compute_basic_values();
        }
        const bool phase_one = !primal_feasible();
        compute_duals(phase_one);

        int q = -1;
        double best = 0.0;
        for (std::size_t k = 0; k < n_ + m_; ++k) {
            if (state_[k] == kBasic || lo_[k] == hi_[k]) {
                continue;
            }
            const double dk = d_[k];
            const bool eligible = (state_[k] == kAtLower && dk < -kDualTol)
                || (state_[k] == kAtUpper && dk > kDualTol)
                || (state_[k] == kFreeZero && std::abs(dk) > kDualTol);
            if (!eligible) {
                continue;
            }
            if (bland) {
                q = static_cast<int>(k);
                break;
            }
            if (std::abs(dk) > best) {
                best = std::abs(dk);
                q = static_cast<int>(k);
            }
        }
        if (q < 0) {
            if (phase_one) {
                if (updates_since_refactor_ > 0) {
                    refactor();
                    compute_basic_values();
                    continue;
                }
                return LpStatus::infeasible;
            }
            return LpStatus::optimal;
        }

        const auto qq = static_cast<std::size_t>(q);
        const int dir = d_[qq] < 0.0 ? 1 : -1;
        column(q, alpha);
        ftran(alpha);

        // Harris two-pass ratio test; phase-one infeasible basics block at the
        // bound where they become feasible.
        double relaxed_max = kInfinity;
        for (std::size_t p = 0; p < m_; ++p) {
            const double delta = -dir * alpha[p];
            if (std::abs(delta) < kPivotTol) {
                continue;
            }
            const auto k = static_cast<std::size_t>(basic_[p]);
            double ratio = kInfinity;
            if (x_[k] < lo_[k] - kPrimalTol) {
                if (delta > 0.0) {
                    ratio = (lo_[k] - x_[k]) / delta;
                }
            } else if (x_[k] > hi_[k] + kPrimalTol) {
                if (delta < 0.0) {
                    ratio = (x_[k] - hi_[k]) / -delta;
                }
            } else if (delta < 0.0) {
                if (std::isfinite(lo_[k])) {
                    ratio = (x_[k] - lo_[k] + (bland ? 0.0 : kPrimalTol)) / -delta;
                }
            } else if (std::isfinite(hi_[k])) {
                ratio = (hi_[k] - x_[k] + (bland ? 0.0 : kPrimalTol)) / delta;
            }
            relaxed_max = std::min(relaxed_max, ratio);
        }

        int r = -1;
        bool leave_upper = false;
        double step = kInfinity;
        double best_pivot = 0.0;
        for (std::size_t p = 0; p < m_; ++p) {
            const double delta = -dir * alpha[p];
            if (std::abs(delta) < kPivotTol) {
                continue;
            }
            const auto k = static_cast<std::size_t>(basic_[p]);
            double ratio = kInfinity;
            bool to_upper = false;
            if (x_[k] < lo_[k] - kPrimalTol) {
                if (delta > 0.0) {
                    ratio = (lo_[k] - x_[k]) / delta;
                }
            } else if (x_[k] > hi_[k] + kPrimalTol) {
                if (delta < 0.0) {
                    ratio = (x_[k] - hi_[k]) / -delta;
                    to_upper = true;
                }
            } else if (delta < 0.0) {
                if (std::isfinite(lo_[k])) {
                    ratio = std::max(0.0, x_[k] - lo_[k]) / -delta;
                }
            } else if (std::isfinite(hi_[k])) {
                ratio = std::max(0.0, hi_[k] - x_[k]) / delta;
                to_upper = true;
            }
            if (!std::isfinite(ratio) || ratio > relaxed_max) {
                continue;
            }
            bool take = false;
            if (bland) {
                take = r < 0 || ratio < step
                    || (ratio == step && basic_[p] < basic_[static_cast<std::size_t>(r)]);
            } else {
                take = std::abs(delta) > best_pivot;
            }
            if (take) {
                r = static_cast<int>(p);
                step = ratio;
                best_pivot = std::abs(delta);
                leave_upper = to_upper;
            }
        }

        const double flip = hi_[qq] - lo_[qq];
        ++total_iterations_;
        if (std::isfinite(flip) && (r < 0 || flip <= step)) {
            x_[qq] = dir > 0 ? hi_[qq] : lo_[qq];
            state_[qq] = dir > 0 ? kAtUpper : kAtLower;
            for (std::size_t p = 0; p < m_; ++p) {
                if (alpha[p] != 0.0) {
                    x_[static_cast<std::size_t>(basic_[p])] -= dir * flip * alpha[p];
                }
            }
            degenerate_run = 0;
            bland = false;
            continue;
        }
        if (r < 0) {
            return phase_one ? LpStatus::infeasible : LpStatus::unbounded;
        }
        if (step < 1e-12) {
            if (++degenerate_run > kDegenerateRunBeforeBland) {
                bland = true;
            }
        } else {
            degenerate_run = 0;
            bland = false;
        }
        pivot(q, r, alpha, step, dir, leave_upper);
    }
}

LpStatus LpSolver::run_dual(std::int64_t limit)
{
    std::vector<double> rho(m_);
    std::vector<double> alpha(m_);
    std::vector<double> row(n_ + m_);
    bool duals_stale = true;
    for (;;) {
        if (total_iterations_ >= limit) {
            return LpStatus::iteration_limit;
        }
        if (updates_since_refactor_ >= kRefactorEvery) {
            refactor();
            compute_basic_values();
            duals_stale = true;
        }
        int r = -1;
        double worst = kPrimalTol;
        for (std::size_t p = 0; p < m_; ++p) {
            const double inf = infeasibility(basic_[p]);
            if (inf > worst) {
                worst = inf;
                r = static_cast<int>(p);
            }
        }
        if (r < 0) {
            return LpStatus::optimal;
        }
        if (duals_stale) {
            compute_duals(false);
            if (!dual_feasible()) {
                // drifted; let the primal finish from here
                return LpStatus::optimal;
            }
            duals_stale = false;
        }
        const auto leaving = static_cast<std::size_t>(basic_[static_cast<std::size_t>(r)]);
        const bool to_lower = x_[leaving] < lo_[leaving];

        std::fill(rho.begin(), rho.end(), 0.0);
        rho[static_cast<std::size_t>(r)] = 1.0;
        btran(rho);

        // x_leaving moves by -a * dx_k when nonbasic k moves by dx_k
        double relaxed_max = kInfinity;
        for (std::size_t k = 0; k < n_ + m_; ++k) {
            row[k] = 0.0;
            if (state_[k] == kBasic || lo_[k] == hi_[k]) {
                continue;
            }
            const double a = dot_column(static_cast<int>(k), rho);
            row[k] = a;
            if (std::abs(a) < kPivotTol) {
                continue;
            }
            const double want = to_lower ? -1.0 : 1.0;  // sign of a * dx needed
            bool ok = false;
            if (state_[k] == kAtLower) {
                ok = a * want > 0.0;
            } else if (state_[k] == kAtUpper) {
                ok = a * want < 0.0;
            } else {
                ok = true;
            }
            if (ok) {
                relaxed_max = std::min(relaxed_max, (std::abs(d_[k]) + kDualTol) / std::abs(a));
            }
        }
        int q = -1;
        double best_pivot = 0.0;
        for (std::size_t k = 0; k < n_ + m_; ++k) {
            const double a = row[k];
            if (a == 0.0 || std::abs(a) < kPivotTol) {
                continue;
            }
            const double want = to_lower ? -1.0 : 1.0;
            bool ok = false;
            if (state_[k] == kAtLower) {
                ok = a * want > 0.0;
            } else if (state_[k] == kAtUpper) {
                ok = a * want < 0.0;
            } else {
                ok = true;
            }
            if (!ok) {
                continue;
            }
            const double ratio = std::abs(d_[k]) / std::abs(a);
            if (ratio <= relaxed_max && std::abs(a) > best_pivot) {
                best_pivot = std::abs(a);
                q = static_cast<int>(k);
            }
        }
        if (q < 0) {
            if (updates_since_refactor_ > 0) {
                refactor();
                compute_basic_values();
                duals_stale = true;
                continue;
            }
            return LpStatus::infeasible;
        }

        column(q, alpha);
        ftran(alpha);
        const double arq = alpha[static_cast<std::size_t>(r)];
        if (std::abs(arq) < kPivotTol
            || std::abs(arq - row[static_cast<std::size_t>(q)]) > 1e-7 * (1.0 + std::abs(arq))) {
            if (updates_since_refactor_ > 0) {
                refactor();
                compute_basic_values();
                duals_stale = true;
                continue;
            }
        }
        // y += t * rho, so d_k -= t * row_k; the leaving column has row 1
        const double t = d_[static_cast<std::size_t>(q)] / row[static_cast<std::size_t>(q)];
        for (std::size_t k = 0; k < n_ + m_; ++k) {
            if (row[k] != 0.0) {
                d_[k] -= t * row[k];
            }
        }
        d_[static_cast<std::size_t>(q)] = 0.0;
        d_[leaving] = -t;
        const double target = to_lower ? lo_[leaving] : hi_[leaving];
        const double dx = (x_[leaving] - target) / arq;
        ++total_iterations_;
        pivot(q, r, alpha, std::abs(dx), dx >= 0.0 ? 1 : -1, !to_lower);
    }
}

LpStatus LpSolver::solve(std::int64_t iteration_limit)
{
    const std::int64_t limit = total_iterations_ + iteration_limit;
    if (!factor_valid_) {
        refactor();
    }
    if (!values_valid_) {
        compute_basic_values();
    }
    if (!primal_feasible()) {
        compute_duals(false);
        if (dual_feasible()) {
            // Shift nonbasic costs away from zero reduced cost so dual steps
            // are not degenerate; the primal pass below removes the shift.
            const std::vector<double> original = cost_;
            for (std::size_t k = 0; k < n_ + m_; ++k) {
                if (state_[k] == kBasic || lo_[k] == hi_[k] || state_[k] == kFreeZero) {
                    continue;
                }
                const double u = 1.0 + std::fmod(static_cast<double>(k) * 0.6180339887, 1.0);
                const double delta = kCostPerturbation * u * (1.0 + std::abs(cost_[k]));
                cost_[k] += state_[k] == kAtLower ? delta : -delta;
            }
            const LpStatus st = run_dual(limit);
            cost_ = original;
            if (st != LpStatus::optimal) {
                return st;
            }
        }
    }
    return run_primal(limit);
}

} // namespace slicenet::milp
