#pragma once

#include <vector>

namespace conefact {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
    LpStatus status;
    std::vector<double> point; // maximizer when Optimal; last feasible iterate when Unbounded
    double value = 0.0;
};

/// Maximize <objective, x> over {x : <rows[i], x> >= rhs[i]}, x free.
/// Dense two-phase simplex with Bland's rule; sized for desk-scale systems.
LpResult lp_solve(const std::vector<double>& objective,
                  const std::vector<std::vector<double>>& rows,
                  const std::vector<double>& rhs);

} // namespace conefact
