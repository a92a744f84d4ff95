#pragma once

#include "conefact/polyhedron.hpp"

#include <cstdint>
#include <vector>

namespace conefact {

/// One expansion entry: `coeff` times anchor number `anchor`.
struct ExpansionTerm {
    int anchor = 0;
    double coeff = 0.0;
};

/// Bilinear feasibility instance M = U V where every row of U and column
/// of V expands affinely from a small set of anchor vectors in R^dim, and
/// every expanded vector must lie in `membership`. Anchors appear in their
/// own expansion as an indicator term.
struct BilinearSystem {
    int dim = 0;
    int num_row_anchors = 0;
    int num_col_anchors = 0;
    std::vector<std::vector<ExpansionTerm>> row_expansion; // n entries
    std::vector<std::vector<ExpansionTerm>> col_expansion; // m entries
    std::vector<std::vector<double>> target;               // n x m
    HPolyhedron membership;
};

struct SolveBudget {
    int starts = 64;
    int iters = 500;
    double tol_feas = -1.0; // < 0 selects 1e-6 * ||target||_inf
    double tol_mem = 1e-8;
    std::uint64_t seed = 0;
    int threads = 1;
};

enum class FeasStatus { Feasible, Unknown };

struct FeasibilityResult {
    FeasStatus status = FeasStatus::Unknown;
    std::vector<std::vector<double>> row_anchors;
    std::vector<std::vector<double>> col_anchors;
    double residual = 0.0;             // max |M_ij - (UV)_ij| achieved
    double constraint_violation = 0.0; // max membership violation
    int winning_start = -1;
};

/// Expanded rows of U (n x dim) for a given anchor assignment.
std::vector<std::vector<double>> expand_rows(const BilinearSystem& sys,
                                             const std::vector<std::vector<double>>& anchors);
std::vector<std::vector<double>> expand_cols(const BilinearSystem& sys,
                                             const std::vector<std::vector<double>>& anchors);

/// Independent evaluation of a candidate assignment: returns
/// {max equation residual, max membership violation}. Shares no state with
/// the solver and is the only path that can certify FEASIBLE.
std::pair<double, double> evaluate_assignment(const BilinearSystem& sys,
                                              const std::vector<std::vector<double>>& row_anchors,
                                              const std::vector<std::vector<double>>& col_anchors);

/// Multistart damped least-squares with hinge penalties for the linear
/// constraints and a penalty-ramp polish. FEASIBLE results are re-verified
/// by evaluate_assignment; the first feasible start (lowest seed) wins.
FeasibilityResult solve(const BilinearSystem& sys, const SolveBudget& budget);

} // namespace conefact
