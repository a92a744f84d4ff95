#include "conefact/bilinear.hpp"

#include "conefact/lp.hpp"
#include "conefact/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conefact {

namespace {

int var_count(const BilinearSystem& sys) {
    return (sys.num_row_anchors + sys.num_col_anchors) * sys.dim;
}

void check_system(const BilinearSystem& sys) {
    if (sys.dim < 1)
        throw std::invalid_argument("bilinear: dim must be >= 1");
    if (sys.membership.dim() != sys.dim)
        throw std::invalid_argument("bilinear: membership dimension mismatch");
    const std::size_t n = sys.row_expansion.size();
    const std::size_t m = sys.col_expansion.size();
    if (sys.target.size() != n)
        throw std::invalid_argument("bilinear: target row count mismatch");
    for (const auto& row : sys.target)
        if (row.size() != m)
            throw std::invalid_argument("bilinear: target column count mismatch");
    auto check_side = [](const std::vector<std::vector<ExpansionTerm>>& side, int anchors) {
        for (const auto& terms : side) {
            if (terms.empty())
                throw std::invalid_argument("bilinear: empty expansion");
            double sum = 0.0;
            for (const auto& t : terms) {
                if (t.anchor < 0 || t.anchor >= anchors)
                    throw std::invalid_argument("bilinear: anchor index out of range");
                sum += t.coeff;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw std::invalid_argument("bilinear: expansion coefficients must sum to 1");
        }
    };
    check_side(sys.row_expansion, sys.num_row_anchors);
    check_side(sys.col_expansion, sys.num_col_anchors);
}

std::vector<std::vector<double>> expand(const std::vector<std::vector<ExpansionTerm>>& exps,
                                        const std::vector<std::vector<double>>& anchors,
                                        int dim) {
    std::vector<std::vector<double>> out(exps.size(), std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < exps.size(); ++i)
        for (const auto& t : exps[i])
            for (int k = 0; k < dim; ++k)
                out[i][k] += t.coeff * anchors[t.anchor][k];
    return out;
}

struct SamplingBox {
    std::vector<double> lo, hi;
};

SamplingBox sampling_box(const HPolyhedron& p, double fallback_radius) {
    const int d = p.dim();
    SamplingBox box;
    box.lo.assign(d, -fallback_radius);
    box.hi.assign(d, fallback_radius);
    auto bb = bounding_box(p);
    if (bb) {
        box.lo = bb->lo;
        box.hi = bb->hi;
        return box;
    }
    // Unbounded region: clamp whatever axis bounds exist to the fallback cube.
    for (const auto& h : p.halfspaces()) {
        int axis = -1;
        bool aligned = true;
        for (int k = 0; k < d; ++k) {
            if (std::abs(h.a[k]) > 1e-12) {
                if (axis >= 0) {
                    aligned = false;
                    break;
                }
                axis = k;
            }
        }
        if (!aligned || axis < 0)
            continue;
        if (h.a[axis] > 0.0)
            box.lo[axis] = std::max(box.lo[axis], h.b / h.a[axis]);
        else
            box.hi[axis] = std::min(box.hi[axis], h.b / h.a[axis]);
    }
    for (int k = 0; k < d; ++k)
        if (box.lo[k] > box.hi[k])
            box.lo[k] = box.hi[k];
    return box;
}

struct Anchors {
    std::vector<std::vector<double>> rows, cols;
};

Anchors unpack(const BilinearSystem& sys, const Eigen::VectorXd& theta) {
    Anchors a;
    a.rows.assign(sys.num_row_anchors, std::vector<double>(sys.dim));
    a.cols.assign(sys.num_col_anchors, std::vector<double>(sys.dim));
    int idx = 0;
    for (auto& v : a.rows)
        for (int k = 0; k < sys.dim; ++k)
            v[k] = theta(idx++);
    for (auto& v : a.cols)
        for (int k = 0; k < sys.dim; ++k)
            v[k] = theta(idx++);
    return a;
}

struct Assembled {
    Eigen::VectorXd f;
    Eigen::MatrixXd jac;
    double eq_max = 0.0;
    double mem_max = 0.0;
    double cost = 0.0;
};

Assembled assemble(const BilinearSystem& sys, const Eigen::VectorXd& theta, double mu,
                   bool with_jacobian) {
    const int d = sys.dim;
    const int n = static_cast<int>(sys.row_expansion.size());
    const int m = static_cast<int>(sys.col_expansion.size());
    const int nv = var_count(sys);
    const int col_base = sys.num_row_anchors * d;

    Anchors a = unpack(sys, theta);
    auto urows = expand(sys.row_expansion, a.rows, d);
    auto vcols = expand(sys.col_expansion, a.cols, d);

    struct Hinge {
        bool is_row;
        int vec;
        int halfspace;
        double g;
    };
    std::vector<Hinge> active;
    const auto& hs = sys.membership.halfspaces();
    auto collect = [&](const std::vector<std::vector<double>>& vecs, bool is_row) {
        for (int i = 0; i < static_cast<int>(vecs.size()); ++i) {
            for (int h = 0; h < static_cast<int>(hs.size()); ++h) {
                double s = 0.0;
                for (int k = 0; k < d; ++k)
                    s += hs[h].a[k] * vecs[i][k];
                double g = hs[h].b - s;
                if (g > 0.0)
                    active.push_back({is_row, i, h, g});
            }
        }
    };
    collect(urows, true);
    collect(vcols, false);

    Assembled out;
    const int rows_total = n * m + static_cast<int>(active.size());
    out.f.resize(rows_total);
    if (with_jacobian)
        out.jac = Eigen::MatrixXd::Zero(rows_total, nv);

    const double smu = std::sqrt(mu);
    int row = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j, ++row) {
            double dotuv = 0.0;
            for (int k = 0; k < d; ++k)
                dotuv += urows[i][k] * vcols[j][k];
            double e = dotuv - sys.target[i][j];
            out.f(row) = e;
            out.eq_max = std::max(out.eq_max, std::abs(e));
            if (with_jacobian) {
                for (const auto& t : sys.row_expansion[i])
                    for (int k = 0; k < d; ++k)
                        out.jac(row, t.anchor * d + k) += t.coeff * vcols[j][k];
                for (const auto& t : sys.col_expansion[j])
                    for (int k = 0; k < d; ++k)
                        out.jac(row, col_base + t.anchor * d + k) += t.coeff * urows[i][k];
            }
        }
    }
    for (const auto& hinge : active) {
        out.f(row) = smu * hinge.g;
        out.mem_max = std::max(out.mem_max, hinge.g);
        if (with_jacobian) {
            const auto& h = hs[hinge.halfspace];
            const auto& terms =
                hinge.is_row ? sys.row_expansion[hinge.vec] : sys.col_expansion[hinge.vec];
            int base = hinge.is_row ? 0 : col_base;
            for (const auto& t : terms)
                for (int k = 0; k < d; ++k)
                    out.jac(row, base + t.anchor * d + k) -= smu * t.coeff * h.a[k];
        }
        ++row;
    }
    out.cost = out.f.squaredNorm();
    return out;
}

struct StartResult {
    bool feasible = false;
    double eq_max = std::numeric_limits<double>::infinity();
    double mem_max = std::numeric_limits<double>::infinity();
    Anchors anchors;
};

StartResult run_start(const BilinearSystem& sys, const SamplingBox& box, double tol_feas,
                      double tol_mem, int iter_cap, std::uint64_t seed, std::uint64_t start) {
    const int nv = var_count(sys);
    auto rng = make_rng(seed, start);
    Eigen::VectorXd theta(nv);
    {
        int idx = 0;
        auto draw = [&](int count) {
            for (int v = 0; v < count; ++v)
                for (int k = 0; k < sys.dim; ++k) {
                    std::uniform_real_distribution<double> u(box.lo[k], box.hi[k]);
                    theta(idx++) = u(rng);
                }
        };
        draw(sys.num_row_anchors);
        draw(sys.num_col_anchors);
    }

    StartResult best;
    double mu = 1.0;
    double lambda = 1e-3;
    int iters_used = 0;

    for (int ramp = 0; ramp < 3; ++ramp) {
        while (iters_used < iter_cap) {
            ++iters_used;
            Assembled cur = assemble(sys, theta, mu, true);
            if (cur.eq_max < best.eq_max ||
                (cur.eq_max == best.eq_max && cur.mem_max < best.mem_max)) {
                best.eq_max = cur.eq_max;
                best.mem_max = cur.mem_max;
                best.anchors = unpack(sys, theta);
            }
            if (cur.eq_max <= tol_feas && cur.mem_max <= tol_mem) {
                best.feasible = true;
                best.anchors = unpack(sys, theta);
                best.eq_max = cur.eq_max;
                best.mem_max = cur.mem_max;
                return best;
            }

            Eigen::VectorXd g = cur.jac.transpose() * cur.f;
            if (g.lpNorm<Eigen::Infinity>() < 1e-14)
                break;
            Eigen::MatrixXd jtj = cur.jac.transpose() * cur.jac;
            Eigen::VectorXd diag = jtj.diagonal();

            bool accepted = false;
            for (int tries = 0; tries < 25 && !accepted; ++tries) {
                Eigen::MatrixXd damped = jtj;
                for (int k = 0; k < nv; ++k)
                    damped(k, k) += lambda * (diag(k) + 1e-12);
                Eigen::VectorXd delta = damped.ldlt().solve(-g);
                Eigen::VectorXd trial = theta + delta;
                Assembled probe = assemble(sys, trial, mu, false);
                if (probe.cost < cur.cost) {
                    theta = trial;
                    lambda = std::max(lambda * 0.35, 1e-12);
                    accepted = true;
                    if (delta.norm() <= 1e-15 * (1.0 + theta.norm()))
                        iters_used = iter_cap; // converged in place
                } else {
                    lambda *= 2.5;
                    if (lambda > 1e14)
                        break;
                }
            }
            if (!accepted)
                break;
        }
        // Equations fit but memberships lag: escalate the hinge weight.
        Assembled before = assemble(sys, theta, mu, false);
        if (before.mem_max > tol_mem && before.eq_max <= 1e3 * tol_feas && iters_used < iter_cap) {
            mu *= 100.0;
            lambda = 1e-3;
            continue;
        }
        break;
    }
    Assembled last = assemble(sys, theta, mu, false);
    if (last.eq_max <= tol_feas && last.mem_max <= tol_mem) {
        best.feasible = true;
        best.anchors = unpack(sys, theta);
        best.eq_max = last.eq_max;
        best.mem_max = last.mem_max;
    }
    return best;
}

} // namespace

std::vector<std::vector<double>> expand_rows(const BilinearSystem& sys,
                                             const std::vector<std::vector<double>>& anchors) {
    return expand(sys.row_expansion, anchors, sys.dim);
}

std::vector<std::vector<double>> expand_cols(const BilinearSystem& sys,
                                             const std::vector<std::vector<double>>& anchors) {
    return expand(sys.col_expansion, anchors, sys.dim);
}

std::pair<double, double> evaluate_assignment(
    const BilinearSystem& sys, const std::vector<std::vector<double>>& row_anchors,
    const std::vector<std::vector<double>>& col_anchors) {
    auto urows = expand_rows(sys, row_anchors);
    auto vcols = expand_cols(sys, col_anchors);
    double eq = 0.0;
    for (std::size_t i = 0; i < urows.size(); ++i)
        for (std::size_t j = 0; j < vcols.size(); ++j) {
            double s = 0.0;
            for (int k = 0; k < sys.dim; ++k)
                s += urows[i][k] * vcols[j][k];
            eq = std::max(eq, std::abs(s - sys.target[i][j]));
        }
    double mem = 0.0;
    for (const auto& u : urows)
        mem = std::max(mem, sys.membership.violation(u));
    for (const auto& v : vcols)
        mem = std::max(mem, sys.membership.violation(v));
    return {eq, mem};
}

FeasibilityResult solve(const BilinearSystem& sys, const SolveBudget& budget) {
    check_system(sys);

    double scale = 0.0;
    for (const auto& row : sys.target)
        for (double v : row)
            scale = std::max(scale, std::abs(v));
    const double tol_feas =
        budget.tol_feas >= 0.0 ? budget.tol_feas : (scale > 0.0 ? 1e-6 * scale : 1e-12);

    SamplingBox box = sampling_box(sys.membership, 1.0 + 2.0 * std::sqrt(std::max(scale, 1.0)));

    FeasibilityResult result;
    result.residual = std::numeric_limits<double>::infinity();
    result.constraint_violation = std::numeric_limits<double>::infinity();

    const int starts = std::max(1, budget.starts);
    const int wave = std::max(1, budget.threads);
    std::vector<StartResult> outcomes(starts);

    for (int wave_begin = 0; wave_begin < starts; wave_begin += wave) {
        int wave_end = std::min(starts, wave_begin + wave);
        parallel_for(static_cast<std::size_t>(wave_end - wave_begin), budget.threads,
                     [&](std::size_t off) {
                         int s = wave_begin + static_cast<int>(off);
                         outcomes[s] = run_start(sys, box, tol_feas, budget.tol_mem,
                                                 budget.iters, budget.seed,
                                                 static_cast<std::uint64_t>(s));
                     });
        for (int s = wave_begin; s < wave_end; ++s) {
            if (!outcomes[s].feasible)
                continue;
            // certify through the independent evaluator before reporting
            auto [eq, mem] = evaluate_assignment(sys, outcomes[s].anchors.rows,
                                                 outcomes[s].anchors.cols);
            if (eq <= tol_feas && mem <= budget.tol_mem) {
                result.status = FeasStatus::Feasible;
                result.row_anchors = outcomes[s].anchors.rows;
                result.col_anchors = outcomes[s].anchors.cols;
                result.residual = eq;
                result.constraint_violation = mem;
                result.winning_start = s;
                return result;
            }
            outcomes[s].feasible = false;
        }
    }

    // UNKNOWN: report the start that came closest to feasibility.
    double best_gap = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        double gap = std::max(outcomes[s].eq_max, outcomes[s].mem_max);
        if (gap < best_gap) {
            best_gap = gap;
            result.residual = outcomes[s].eq_max;
            result.constraint_violation = outcomes[s].mem_max;
        }
    }
    return result;
}

} // namespace conefact
