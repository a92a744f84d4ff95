#pragma once

#include "conefact/bilinear.hpp"
#include "conefact/polyhedron.hpp"

#include <optional>
#include <vector>

namespace conefact {

struct FactorBudget {
    long max_partitions = 10000; // (column, row) partition pairs
    double wall_clock_s = 300.0;
    SolveBudget oracle;
};

/// Exact-factorization instance: find M = U V with every row of U and
/// column of V inside the bounded polyhedron P in R^d.
struct FactorInstance {
    std::vector<std::vector<double>> m; // n x m, entrywise >= 0
    HPolyhedron p;
    int d = 0;
    FactorBudget budget;
    double tol_rank = 1e-8;
};

struct FactorPair {
    std::vector<std::vector<double>> u_rows; // n vectors in R^d
    std::vector<std::vector<double>> v_cols; // m vectors in R^d
    double residual = 0.0;
    double membership_violation = 0.0;
};

struct AffineBasis {
    std::vector<int> basis_indices;
    int dim = 0;
};

/// Deterministic greedy maximal affinely independent subset (by index).
AffineBasis affine_basis(const std::vector<std::vector<double>>& points,
                         double tol_rank = 1e-8);

/// Coefficients lambda with sum 1 and sum lambda_i basis_i = target; throws
/// when the target is outside the affine hull of the basis.
std::vector<double> affine_coeffs(const std::vector<std::vector<double>>& basis,
                                  const std::vector<double>& target, double tol_rank = 1e-8);

/// The minimal-face normalization: move each column of V along ker(U)
/// (then each row of U along ker(V^T)) to a minimal face of P, preserving
/// the product exactly. P must be bounded.
std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>
normalize_to_minimal_faces(const std::vector<std::vector<double>>& u_rows,
                           const std::vector<std::vector<double>>& v_cols,
                           const HPolyhedron& p, double tol_rank = 1e-8);

/// Search over polyhedral partitions of rows and columns, anchor bases and
/// bilinear systems. NOT_FOUND (nullopt) means the budget ran out, not a
/// certificate of infeasibility.
std::optional<FactorPair> factor_in_polyhedron(const FactorInstance& instance);

} // namespace conefact
