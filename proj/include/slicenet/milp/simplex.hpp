#pragma once

#include "slicenet/milp/model.hpp"

#include <cstdint>
#include <vector>

namespace slicenet::milp {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

/// Snapshot of a simplex basis, enough to warm-start a later solve of the
/// same model with different bounds.
struct BasisState {
    std::vector<int> basic;              // row position -> variable (structural j, or n + row)
    std::vector<std::uint8_t> at_upper;  // per variable, for nonbasic ones
};

/// Bounded-variable revised simplex over a MilpModel with binaries relaxed
/// to their bounds.
///
/// Rows are written as A x - r = 0 with bounded row activities r, so every
/// constraint gets a logical column. The basis inverse is kept in product
/// form and rebuilt periodically. Rows and continuous columns are scaled
/// internally; every public value is in model units.
///
/// Pricing is Dantzig (largest reduced cost, lowest index on ties) and falls
/// back to Bland's rule after a run of degenerate pivots.
class LpSolver {
public:
    explicit LpSolver(const MilpModel& model);

    std::size_t structural_count() const { return n_; }
    std::size_t row_count() const { return m_; }

    void set_bounds(int var, double lower, double upper);
    double lower(int var) const;
    double upper(int var) const;

    LpStatus solve(std::int64_t iteration_limit = 1'000'000);

    double objective() const;
    double value(int var) const;
    std::vector<double> primal() const;

    BasisState basis() const;
    void load_basis(const BasisState& state);

    std::int64_t iterations() const { return total_iterations_; }

private:
    struct Eta {
        int pos = 0;
        double pivot = 1.0;
        std::vector<int> idx;
        std::vector<double> val;
    };

    enum : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeZero = 3 };

    void scale(const MilpModel& model);
    void refactor();
    void compute_basic_values();
    void ftran(std::vector<double>& v) const;
    void btran(std::vector<double>& v) const;
    void column(int k, std::vector<double>& out) const;
    double dot_column(int k, const std::vector<double>& y) const;
    void push_eta(const std::vector<double>& alpha, int pos);
    void place_nonbasic(int k);

    double infeasibility(int k) const;
    bool primal_feasible() const;
    void compute_duals(bool phase_one);
    bool dual_feasible() const;

    LpStatus run_primal(std::int64_t limit);
    LpStatus run_dual(std::int64_t limit);
    void pivot(int q, int r, const std::vector<double>& alpha, double step, int dir,
               bool leave_at_upper);

    std::size_t n_ = 0;
    std::size_t m_ = 0;

    // structural columns, compressed sparse column, scaled
    std::vector<int> col_start_;
    std::vector<int> row_idx_;
    std::vector<double> val_;

    std::vector<double> col_scale_;
    std::vector<double> row_scale_;

    // per variable (n structurals followed by m logicals), scaled
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<double> cost_;
    std::vector<double> x_;
    std::vector<std::uint8_t> state_;

    std::vector<int> basic_;
    std::vector<int> pos_;

    std::vector<Eta> etas_;
    std::size_t eta_nnz_ = 0;
    std::size_t updates_since_refactor_ = 0;
    bool factor_valid_ = false;
    bool values_valid_ = false;

    std::vector<double> y_;
    std::vector<double> d_;

    double offset_ = 0.0;
    std::int64_t total_iterations_ = 0;
};

} // namespace slicenet::milp
