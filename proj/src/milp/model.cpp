#include "slicenet/milp/model.hpp"

#include <algorithm>
#include <cmath>

namespace slicenet::milp {

int MilpModel::add_binary(std::string name)
{
    const int id = static_cast<int>(variables_.size());
    variables_.push_back({id, VarKind::binary, std::move(name), 0.0, 1.0});
    objective_.push_back(0.0);
    return id;
}

int MilpModel::add_continuous(std::string name, double lower, double upper)
{
    const int id = static_cast<int>(variables_.size());
    variables_.push_back({id, VarKind::continuous, std::move(name), lower, upper});
    objective_.push_back(0.0);
    return id;
}

void MilpModel::fix(int var, double value)
{
    auto& v = variables_.at(static_cast<std::size_t>(var));
    v.lower = value;
    v.upper = value;
}

std::size_t MilpModel::add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                                      std::string tag)
{
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const auto& t : terms) {
        if (!merged.empty() && merged.back().var == t.var) {
            merged.back().coef += t.coef;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    constraints_.push_back({std::move(merged), relation, rhs, std::move(tag)});
    return constraints_.size() - 1;
}

void MilpModel::set_objective(int var, double coef)
{
    objective_.at(static_cast<std::size_t>(var)) = coef;
}

void MilpModel::add_objective(int var, double coef)
{
    objective_.at(static_cast<std::size_t>(var)) += coef;
}

std::size_t MilpModel::binary_count() const
{
    return static_cast<std::size_t>(std::count_if(
        variables_.begin(), variables_.end(),
        [](const Variable& v) { return v.kind == VarKind::binary; }));
}

std::size_t MilpModel::count_tagged(const std::string& prefix) const
{
    std::size_t n = 0;
    for (const auto& c : constraints_) {
        if (c.tag.size() >= prefix.size() && c.tag.compare(0, prefix.size(), prefix) == 0
            && (c.tag.size() == prefix.size() || c.tag[prefix.size()] == ' ')) {
            ++n;
        }
    }
    return n;
}

double MilpModel::evaluate_objective(const std::vector<double>& values) const
{
    double z = objective_offset_;
    for (std::size_t j = 0; j < objective_.size(); ++j) {
        z += objective_[j] * values[j];
    }
    return z;
}

double MilpModel::activity(const LinearConstraint& row, const std::vector<double>& values) const
{
    double s = 0.0;
    for (const auto& t : row.terms) {
        s += t.coef * values[static_cast<std::size_t>(t.var)];
    }
    return s;
}

namespace {

double row_violation(double act, Relation rel, double rhs)
{
    switch (rel) {
    case Relation::less_equal:
        return std::max(0.0, act - rhs);
    case Relation::greater_equal:
        return std::max(0.0, rhs - act);
    case Relation::equal:
        return std::abs(act - rhs);
    }
    return 0.0;
}

} // namespace

double MilpModel::max_violation(const std::vector<double>& values) const
{
    double worst = 0.0;
    for (const auto& c : constraints_) {
        worst = std::max(worst, row_violation(activity(c, values), c.relation, c.rhs));
    }
    for (const auto& v : variables_) {
        const double x = values[static_cast<std::size_t>(v.id)];
        worst = std::max({worst, v.lower - x, x - v.upper});
    }
    return worst;
}

double MilpModel::max_integrality_violation(const std::vector<double>& values) const
{
    double worst = 0.0;
    for (const auto& v : variables_) {
        if (v.kind == VarKind::binary) {
            const double x = values[static_cast<std::size_t>(v.id)];
            worst = std::max(worst, std::abs(x - std::round(x)));
        }
    }
    return worst;
}

const LinearConstraint* MilpModel::first_violated(const std::vector<double>& values,
                                                  double tol) const
{
    for (const auto& c : constraints_) {
        if (row_violation(activity(c, values), c.relation, c.rhs) > tol) {
            return &c;
        }
    }
    return nullptr;
}

void MilpModel::validate() const
{
    const auto n = static_cast<int>(variables_.size());
    for (const auto& c : constraints_) {
        int prev = -1;
        for (const auto& t : c.terms) {
            if (t.var < 0 || t.var >= n) {
                throw ModelError("constraint '" + c.tag + "' references unknown variable "
                                 + std::to_string(t.var));
            }
            if (t.var == prev) {
                throw ModelError("constraint '" + c.tag + "' repeats variable "
                                 + std::to_string(t.var));
            }
            if (!std::isfinite(t.coef)) {
                throw ModelError("constraint '" + c.tag + "' has a non-finite coefficient");
            }
            prev = t.var;
        }
        if (!std::isfinite(c.rhs)) {
            throw ModelError("constraint '" + c.tag + "' has a non-finite right-hand side");
        }
    }
    for (const auto& v : variables_) {
        if (v.lower > v.upper || (std::isinf(v.lower) && v.lower > 0)) {
            throw ModelError("variable '" + v.name + "' has inconsistent bounds");
        }
        if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0)) {
            throw ModelError("binary variable '" + v.name + "' has bounds outside [0,1]");
        }
    }
    if (objective_.size() != variables_.size()) {
        throw ModelError("objective length does not match variable count");
    }
}

const char* to_string(Relation relation)
{
    switch (relation) {
    case Relation::less_equal:
        return "<=";
    case Relation::greater_equal:
        return ">=";
    case Relation::equal:
        return "=";
    }
    return "?";
}

} // namespace slicenet::milp
