#include "oracle/enumerate.hpp"

#include <stdexcept>

namespace oracle {

using slicenet::milp::MilpModel;
using slicenet::milp::Relation;
using slicenet::milp::VarKind;

std::optional<Enumerated> enumerate_binary(const MilpModel& model)
{
    const auto n = model.variable_count();
    if (n > 24) {
        throw std::invalid_argument("enumerate_binary: too many variables");
    }
    for (const auto& v : model.variables()) {
        if (v.kind != VarKind::binary) {
            throw std::invalid_argument("enumerate_binary: model has continuous variables");
        }
    }
    std::optional<Enumerated> best;
    std::vector<double> x(n);
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            x[j] = (mask >> j) & 1u ? 1.0 : 0.0;
            const auto& v = model.variables()[j];
            ok = x[j] >= v.lower && x[j] <= v.upper;
        }
        for (const auto& c : model.constraints()) {
            if (!ok) {
                break;
            }
            double s = 0.0;
            for (const auto& t : c.terms) {
                s += t.coef * x[static_cast<std::size_t>(t.var)];
            }
            switch (c.relation) {
            case Relation::less_equal:
                ok = s <= c.rhs + 1e-9;
                break;
            case Relation::greater_equal:
                ok = s >= c.rhs - 1e-9;
                break;
            case Relation::equal:
                ok = s >= c.rhs - 1e-9 && s <= c.rhs + 1e-9;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        double z = model.objective_offset();
        for (std::size_t j = 0; j < n; ++j) {
            z += model.objective()[j] * x[j];
        }
        if (!best || z < best->objective) {
            best = Enumerated{z, x};
        }
    }
    return best;
}

} // namespace oracle
