#include "conefact/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace conefact {

namespace {

constexpr double kPivTol = 1e-9;

// Tableau for minimization in standard form: min d^T z, B z = rhs, z >= 0.
struct Tableau {
    int m, n; // constraints, variables
    std::vector<std::vector<double>> t; // (m+1) x (n+1); last row = reduced costs, last col = rhs
    std::vector<int> basis;

    void pivot(int row, int col) {
        double p = t[row][col];
        for (int j = 0; j <= n; ++j)
            t[row][j] /= p;
        for (int i = 0; i <= m; ++i) {
            if (i == row)
                continue;
            double f = t[i][col];
            if (f == 0.0)
                continue;
            for (int j = 0; j <= n; ++j)
                t[i][j] -= f * t[row][j];
        }
        basis[row] = col;
    }

    // Bland's rule: smallest eligible entering index, and among rows tied at
    // the minimum ratio, the one whose basic variable index is smallest.
    bool step(bool* unbounded, int active_cols) {
        int enter = -1;
        for (int j = 0; j < active_cols; ++j) {
            if (t[m][j] < -kPivTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0)
            return false;

        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
            if (t[i][enter] > kPivTol)
                best_ratio = std::min(best_ratio, t[i][n] / t[i][enter]);
        if (best_ratio == std::numeric_limits<double>::infinity()) {
            *unbounded = true;
            return false;
        }
        int leave = -1;
        for (int i = 0; i < m; ++i) {
            if (t[i][enter] > kPivTol && t[i][n] / t[i][enter] <= best_ratio + 1e-12) {
                if (leave < 0 || basis[i] < basis[leave])
                    leave = i;
            }
        }
        pivot(leave, enter);
        return true;
    }
};

} // namespace

LpResult lp_solve(const std::vector<double>& objective,
                  const std::vector<std::vector<double>>& rows,
                  const std::vector<double>& rhs) {
    const int nvar = static_cast<int>(objective.size());
    const int m = static_cast<int>(rows.size());
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != nvar)
            throw std::invalid_argument("lp_solve: row dimension mismatch");
    if (rhs.size() != rows.size())
        throw std::invalid_argument("lp_solve: rhs size mismatch");

    // z = [y+ (nvar); y- (nvar); slack (m); artificial (m)]
    const int n_std = 2 * nvar + m;
    const int n_all = n_std + m;

    Tableau tb;
    tb.m = m;
    tb.n = n_all;
    tb.t.assign(m + 1, std::vector<double>(n_all + 1, 0.0));
    tb.basis.assign(m, 0);

    for (int i = 0; i < m; ++i) {
        double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < nvar; ++j) {
            tb.t[i][j] = sign * rows[i][j];
            tb.t[i][nvar + j] = -sign * rows[i][j];
        }
        tb.t[i][2 * nvar + i] = -sign; // <a,x> - s = b
        tb.t[i][n_std + i] = 1.0;
        tb.t[i][n_all] = sign * rhs[i];
        tb.basis[i] = n_std + i;
    }
    // Phase I objective: min sum of artificials, expressed in reduced form.
    for (int j = 0; j <= n_all; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            s += tb.t[i][j];
        tb.t[m][j] = (j >= n_std && j < n_all) ? 0.0 : -s;
    }

    // Once an artificial leaves the basis it never re-enters.
    bool unbounded = false;
    while (tb.step(&unbounded, n_std)) {
    }
    if (unbounded)
        throw std::runtime_error("lp_solve: phase I unbounded");

    double phase1 = -tb.t[m][n_all]; // objective value = sum of artificials
    if (phase1 > 1e-7)
        return {LpStatus::Infeasible, {}, 0.0};

    // Drive remaining artificials out of the basis.
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] >= n_std) {
            int piv = -1;
            for (int j = 0; j < n_std; ++j) {
                if (std::abs(tb.t[i][j]) > kPivTol) {
                    piv = j;
                    break;
                }
            }
            if (piv >= 0)
                tb.pivot(i, piv);
            // else: redundant row, harmless to leave
        }
    }
    for (int i = 0; i <= m; ++i)
        for (int j = n_std; j < n_all; ++j)
            tb.t[i][j] = 0.0;

    // Phase II: min -(c^T y+ - c^T y-).
    for (int j = 0; j <= n_all; ++j)
        tb.t[m][j] = 0.0;
    for (int j = 0; j < nvar; ++j) {
        tb.t[m][j] = -objective[j];
        tb.t[m][nvar + j] = objective[j];
    }
    for (int i = 0; i < m; ++i) {
        int b = tb.basis[i];
        double f = tb.t[m][b];
        if (f != 0.0)
            for (int j = 0; j <= n_all; ++j)
                tb.t[m][j] -= f * tb.t[i][j];
    }

    unbounded = false;
    while (tb.step(&unbounded, n_std)) {
    }

    std::vector<double> z(n_std, 0.0);
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] < n_std)
            z[tb.basis[i]] = tb.t[i][n_all];
    std::vector<double> x(nvar);
    for (int j = 0; j < nvar; ++j)
        x[j] = z[j] - z[nvar + j];

    if (unbounded)
        return {LpStatus::Unbounded, x, 0.0};

    double value = 0.0;
    for (int j = 0; j < nvar; ++j)
        value += objective[j] * x[j];
    return {LpStatus::Optimal, x, value};
}

} // namespace conefact
