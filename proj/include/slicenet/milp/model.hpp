#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicenet::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { binary, continuous };

struct Variable {
    int id = 0;
    VarKind kind = VarKind::continuous;
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
};

enum class Relation { less_equal, equal, greater_equal };

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct LinearConstraint {
    std::vector<Term> terms;
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
    std::string tag;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mixed-binary linear program, always minimized.
///
/// Binary variables live in {0,1} (bounds may pin them to a single value);
/// continuous variables are nonnegative unless given other bounds.
class MilpModel {
public:
    int add_binary(std::string name);
    int add_continuous(std::string name, double lower = 0.0, double upper = kInfinity);

    /// Pins a variable to a single value; used to freeze decisions taken by
    /// an earlier stage.
    void fix(int var, double value);

    /// Duplicate variable ids in `terms` are merged; zero coefficients dropped.
    std::size_t add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                               std::string tag);

    void set_objective(int var, double coef);
    void add_objective(int var, double coef);
    void set_objective_offset(double offset) { objective_offset_ = offset; }

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::vector<double>& objective() const { return objective_; }
    double objective_offset() const { return objective_offset_; }

    std::size_t variable_count() const { return variables_.size(); }
    std::size_t constraint_count() const { return constraints_.size(); }
    std::size_t binary_count() const;

    /// Number of constraints whose tag starts with `prefix` followed by a
    /// space or end of tag ("C5-a" matches "C5-a ..." but not "C5-ab").
    std::size_t count_tagged(const std::string& prefix) const;

    double evaluate_objective(const std::vector<double>& values) const;
    double activity(const LinearConstraint& row, const std::vector<double>& values) const;

    /// Largest violation over rows and bounds, and over binary integrality.
    double max_violation(const std::vector<double>& values) const;
    double max_integrality_violation(const std::vector<double>& values) const;

    /// First constraint violated by more than `tol`, or nullptr.
    const LinearConstraint* first_violated(const std::vector<double>& values,
                                           double tol) const;

    /// Throws ModelError when a term or objective entry references a missing
    /// variable or bounds are inconsistent.
    void validate() const;

private:
    std::vector<Variable> variables_;
    std::vector<LinearConstraint> constraints_;
    std::vector<double> objective_;
    double objective_offset_ = 0.0;
};

const char* to_string(Relation relation);

} // namespace slicenet::milp
