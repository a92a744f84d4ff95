#include "conefact/factorizer.hpp"

#include "conefact/partition.hpp"
#include "conefact/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace conefact {

namespace {

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
        return {};
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(i, j) = rows[i][j];
    return m;
}

int numerical_rank(const Eigen::MatrixXd& m, double tol) {
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    double thresh = tol * std::max(1.0, svd.singularValues()(0));
    int r = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > thresh)
            ++r;
    return r;
}

// Null-space basis (columns), deterministic orientation.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() == 0)
        return Eigen::MatrixXd::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    double thresh = tol * std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > thresh)
            ++rank;
    Eigen::MatrixXd kern = svd.matrixV().rightCols(m.cols() - rank);
    for (int c = 0; c < kern.cols(); ++c) {
        for (int r = 0; r < kern.rows(); ++r) {
            if (std::abs(kern(r, c)) > 1e-12) {
                if (kern(r, c) < 0.0)
                    kern.col(c) = -kern.col(c);
                break;
            }
        }
    }
    return kern;
}

// Principal-component compression of a point cloud to dimension <= d,
// rescaled to unit size so that scaled instances enumerate identically.
std::vector<std::vector<double>> compress_points(const std::vector<std::vector<double>>& pts,
                                                 int d, double tol_rank) {
    const int count = static_cast<int>(pts.size());
    const int amb = static_cast<int>(pts[0].size());
    Eigen::MatrixXd x(amb, count);
    for (int j = 0; j < count; ++j)
        for (int i = 0; i < amb; ++i)
            x(i, j) = pts[j][i];
    Eigen::VectorXd mean = x.rowwise().mean();
    Eigen::MatrixXd centered = x.colwise() - mean;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > tol_rank * std::max(1.0, smax))
            ++rank;
    int q = std::max(1, std::min(d, rank));
    Eigen::MatrixXd coords = svd.matrixU().leftCols(q).transpose() * centered;

    double scale = coords.cwiseAbs().maxCoeff();
    if (scale > 0.0)
        coords /= scale;
    std::vector<std::vector<double>> out(count, std::vector<double>(q));
    for (int j = 0; j < count; ++j)
        for (int k = 0; k < q; ++k)
            out[j][k] = coords(k, j);
    return out;
}

// p^e saturated at cap.
long pow_sat(std::size_t p, double e, long cap) {
    if (p <= 1)
        return 1;
    long double v = std::pow(static_cast<long double>(p), static_cast<long double>(e));
    if (v >= static_cast<long double>(cap))
        return cap;
    return static_cast<long>(v);
}

struct SidePlan {
    std::vector<std::vector<ExpansionTerm>> expansions; // per row/column of M
    int anchor_count = 0;
};

// Anchors and affine-expansion coefficients for one side of the product,
// computed from the corresponding vectors of M (Prop 9 transfer).
std::optional<SidePlan> plan_side(const std::vector<std::vector<double>>& m_vectors,
                                  const PolyPartition& partition, double tol_rank) {
    SidePlan plan;
    plan.expansions.assign(m_vectors.size(), {});
    for (const auto& part : partition.parts) {
        std::vector<std::vector<double>> part_vecs;
        part_vecs.reserve(part.size());
        for (int idx : part)
            part_vecs.push_back(m_vectors[idx]);
        AffineBasis basis = affine_basis(part_vecs, tol_rank);
        std::vector<int> anchor_ids(basis.basis_indices.size());
        std::vector<std::vector<double>> anchor_vecs;
        anchor_vecs.reserve(basis.basis_indices.size());
        for (std::size_t a = 0; a < basis.basis_indices.size(); ++a) {
            int local = basis.basis_indices[a];
            anchor_ids[a] = plan.anchor_count++;
            anchor_vecs.push_back(part_vecs[local]);
            plan.expansions[part[local]] = {{anchor_ids[a], 1.0}};
        }
        for (std::size_t local = 0; local < part.size(); ++local) {
            int global = part[local];
            if (!plan.expansions[global].empty())
                continue; // anchor
            std::vector<double> coeffs;
            try {
                coeffs = affine_coeffs(anchor_vecs, part_vecs[local], tol_rank);
            } catch (const std::invalid_argument&) {
                return std::nullopt; // basis does not span this member
            }
            for (std::size_t a = 0; a < coeffs.size(); ++a)
                plan.expansions[global].push_back({anchor_ids[a], coeffs[a]});
        }
    }
    return plan;
}

} // namespace

AffineBasis affine_basis(const std::vector<std::vector<double>>& points, double tol_rank) {
    if (points.empty())
        throw std::invalid_argument("affine_basis: empty point set");
    const int d = static_cast<int>(points[0].size());
    AffineBasis out;
    out.basis_indices.push_back(0);

    Eigen::MatrixXd dirs(d, 0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        Eigen::VectorXd diff(d);
        for (int k = 0; k < d; ++k)
            diff(k) = points[i][k] - points[0][k];
        // residual after projecting on the span collected so far (twice, for
        // numerical hygiene)
        Eigen::VectorXd res = diff;
        for (int pass = 0; pass < 2; ++pass)
            if (dirs.cols() > 0)
                res -= dirs * (dirs.transpose() * res);
        if (res.norm() > tol_rank * std::max(1.0, diff.norm())) {
            dirs.conservativeResize(d, dirs.cols() + 1);
            dirs.col(dirs.cols() - 1) = res / res.norm();
            out.basis_indices.push_back(static_cast<int>(i));
        }
    }
    out.dim = static_cast<int>(out.basis_indices.size()) - 1;
    return out;
}

std::vector<double> affine_coeffs(const std::vector<std::vector<double>>& basis,
                                  const std::vector<double>& target, double tol_rank) {
    if (basis.empty())
        throw std::invalid_argument("affine_coeffs: empty basis");
    const int d = static_cast<int>(target.size());
    const int k = static_cast<int>(basis.size());
    Eigen::MatrixXd a(d + 1, k);
    Eigen::VectorXd b(d + 1);
    for (int j = 0; j < k; ++j) {
        if (static_cast<int>(basis[j].size()) != d)
            throw std::invalid_argument("affine_coeffs: dimension mismatch");
        for (int i = 0; i < d; ++i)
            a(i, j) = basis[j][i];
        a(d, j) = 1.0; // affine combination
    }
    for (int i = 0; i < d; ++i)
        b(i) = target[i];
    b(d) = 1.0;

    Eigen::VectorXd lam = a.colPivHouseholderQr().solve(b);
    double scale = std::max(1.0, b.norm());
    if ((a * lam - b).norm() > tol_rank * scale * 10.0)
        throw std::invalid_argument("affine_coeffs: target outside the affine hull");
    return std::vector<double>(lam.data(), lam.data() + k);
}

namespace {

// Move each vector along the kernel to a minimal face (Lemma 6 descent).
void normalize_side(std::vector<std::vector<double>>& vecs, const Eigen::MatrixXd& kern,
                    const HPolyhedron& p, double tol_rank) {
    if (kern.cols() == 0)
        return;
    const int d = p.dim();
    PolyConfig cfg;
    cfg.tol_rank = tol_rank;
    for (auto& v : vecs) {
        for (int iter = 0; iter <= d + 1; ++iter) {
            Face face = minimal_face(p, v, cfg);
            // direction u in ker with all tight normals orthogonal to u
            Eigen::MatrixXd tight(face.tight_set.size(), d);
            for (std::size_t t = 0; t < face.tight_set.size(); ++t)
                for (int k = 0; k < d; ++k)
                    tight(t, k) = p.halfspaces()[face.tight_set[t]].a[k];
            Eigen::MatrixXd restricted = tight.rows() ? Eigen::MatrixXd(tight * kern)
                                                      : Eigen::MatrixXd::Zero(0, kern.cols());
            Eigen::MatrixXd inner_kernel = kernel_basis(restricted, tol_rank);
            if (inner_kernel.cols() == 0)
                break; // minimal: (v + ker) meets aff(F_v) only at v
            Eigen::VectorXd u = kern * inner_kernel.col(0);
            double un = u.norm();
            if (un < 1e-14)
                break;
            u /= un;
            for (int k = 0; k < d; ++k) {
                if (std::abs(u(k)) > 1e-12) {
                    if (u(k) < 0.0)
                        u = -u;
                    break;
                }
            }
            // ratio test, negative direction first
            double lam_min = -std::numeric_limits<double>::infinity();
            for (const auto& h : p.halfspaces()) {
                double au = 0.0, av = 0.0;
                for (int k = 0; k < d; ++k) {
                    au += h.a[k] * u(k);
                    av += h.a[k] * v[k];
                }
                if (au > 1e-11)
                    lam_min = std::max(lam_min, (h.b - av) / au);
            }
            if (!std::isfinite(lam_min))
                throw std::invalid_argument(
                    "normalize_to_minimal_faces: polyhedron is unbounded along the kernel");
            if (iter == d + 1)
                throw std::logic_error("normalize_to_minimal_faces: descent failed to terminate");
            for (int k = 0; k < d; ++k)
                v[k] += lam_min * u(k);
        }
    }
}

} // namespace

std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>
normalize_to_minimal_faces(const std::vector<std::vector<double>>& u_rows,
                           const std::vector<std::vector<double>>& v_cols,
                           const HPolyhedron& p, double tol_rank) {
    auto u = u_rows;
    auto v = v_cols;
    // columns first against ker(U), then rows against ker(V^T)
    Eigen::MatrixXd umat = to_eigen(u);
    normalize_side(v, kernel_basis(umat, tol_rank), p, tol_rank);
    Eigen::MatrixXd vmat_t(v.size(), p.dim());
    for (std::size_t j = 0; j < v.size(); ++j)
        for (int k = 0; k < p.dim(); ++k)
            vmat_t(j, k) = v[j][k];
    normalize_side(u, kernel_basis(vmat_t, tol_rank), p, tol_rank);
    return {u, v};
}

std::optional<FactorPair> factor_in_polyhedron(const FactorInstance& instance) {
    const auto start_time = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
            .count();
    };

    const int n = static_cast<int>(instance.m.size());
    if (n == 0)
        throw std::invalid_argument("factor_in_polyhedron: empty matrix");
    const int m = static_cast<int>(instance.m[0].size());
    const int d = instance.d;
    if (d < 1 || instance.p.dim() != d)
        throw std::invalid_argument("factor_in_polyhedron: dimension mismatch");
    for (const auto& row : instance.m) {
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("factor_in_polyhedron: ragged matrix");
        for (double v : row)
            if (v < -1e-12)
                throw std::invalid_argument("factor_in_polyhedron: matrix must be nonnegative");
    }
    if (!bounding_box(instance.p))
        throw std::invalid_argument("factor_in_polyhedron: polyhedron must be bounded");

    const double tol_rank = instance.tol_rank;
    Eigen::MatrixXd mmat = to_eigen(instance.m);
    if (numerical_rank(mmat, tol_rank) > d)
        return std::nullopt; // no rank-d factorization exists at all

    // Columns of M as points (compressed), rows likewise.
    std::vector<std::vector<double>> col_pts(m), row_pts(n);
    for (int j = 0; j < m; ++j) {
        col_pts[j].resize(n);
        for (int i = 0; i < n; ++i)
            col_pts[j][i] = instance.m[i][j];
    }
    for (int i = 0; i < n; ++i)
        row_pts[i] = instance.m[i];
    auto col_compressed = compress_points(col_pts, d, tol_rank);
    auto row_compressed = compress_points(row_pts, d, tol_rank);

    // Lemma bounds: at most p^d parts, polyhedra of at most p^(2^d)
    // halfspaces; both saturate at the ground-set size.
    const std::size_t p_count = std::max<std::size_t>(1, instance.p.size());
    const long k_cap_cols = pow_sat(p_count, d, m);
    const long k_cap_rows = pow_sat(p_count, d, n);
    const long k2 = pow_sat(p_count, std::pow(2.0, d), std::max(n, m));

    PartitionStream col_stream(col_compressed, static_cast<int>(k_cap_cols),
                               static_cast<int>(k2));
    PartitionStream row_stream(row_compressed, static_cast<int>(k_cap_rows),
                               static_cast<int>(k2));

    std::vector<std::vector<PolyPartition>> col_groups(col_stream.max_parts() + 1);
    std::vector<std::vector<PolyPartition>> row_groups(row_stream.max_parts() + 1);
    std::vector<bool> col_done(col_groups.size(), false), row_done(row_groups.size(), false);
    auto cols_with = [&](int k) -> const std::vector<PolyPartition>& {
        if (!col_done[k]) {
            col_groups[k] = col_stream.partitions_with_parts(k);
            col_done[k] = true;
        }
        return col_groups[k];
    };
    auto rows_with = [&](int k) -> const std::vector<PolyPartition>& {
        if (!row_done[k]) {
            row_groups[k] = row_stream.partitions_with_parts(k);
            row_done[k] = true;
        }
        return row_groups[k];
    };

    // row vectors of M for the row side; column vectors for the column side
    std::vector<std::vector<double>> m_cols = col_pts;
    std::vector<std::vector<double>> m_rows = row_pts;

    long pairs_tried = 0;
    const int max_sum = col_stream.max_parts() + row_stream.max_parts();
    for (int sum = 2; sum <= max_sum; ++sum) {
        for (int k = 1; k < sum; ++k) {
            int l = sum - k;
            if (k > col_stream.max_parts() || l > row_stream.max_parts())
                continue;
            const auto& cps = cols_with(k);
            const auto& rps = rows_with(l);
            for (const auto& cp : cps) {
                auto col_plan = plan_side(m_cols, cp, tol_rank);
                if (!col_plan)
                    continue;
                for (const auto& rp : rps) {
                    if (pairs_tried >= instance.budget.max_partitions ||
                        elapsed() > instance.budget.wall_clock_s)
                        return std::nullopt;
                    ++pairs_tried;

                    auto row_plan = plan_side(m_rows, rp, tol_rank);
                    if (!row_plan)
                        continue;

                    BilinearSystem sys;
                    sys.dim = d;
                    sys.num_row_anchors = row_plan->anchor_count;
                    sys.num_col_anchors = col_plan->anchor_count;
                    sys.row_expansion = row_plan->expansions;
                    sys.col_expansion = col_plan->expansions;
                    sys.target = instance.m;
                    sys.membership = instance.p;

                    FeasibilityResult r = solve(sys, instance.budget.oracle);
                    if (r.status != FeasStatus::Feasible)
                        continue;

                    FactorPair pair;
                    pair.u_rows = expand_rows(sys, r.row_anchors);
                    pair.v_cols = expand_cols(sys, r.col_anchors);
                    // re-check independently of the oracle's own bookkeeping
                    double resid = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < m; ++j) {
                            double s = 0.0;
                            for (int kk = 0; kk < d; ++kk)
                                s += pair.u_rows[i][kk] * pair.v_cols[j][kk];
                            resid = std::max(resid, std::abs(s - instance.m[i][j]));
                        }
                    double viol = 0.0;
                    for (const auto& u : pair.u_rows)
                        viol = std::max(viol, instance.p.violation(u));
                    for (const auto& v : pair.v_cols)
                        viol = std::max(viol, instance.p.violation(v));
                    pair.residual = resid;
                    pair.membership_violation = viol;
                    return pair;
                }
            }
        }
    }
    return std::nullopt;
}

} // namespace conefact
