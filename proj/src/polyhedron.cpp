#include "conefact/polyhedron.hpp"

#include "conefact/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conefact {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * x[i];
    return s;
}

bool near_duplicate(const Halfspace& h, const Halfspace& g) {
    if (std::abs(h.b - g.b) > 1e-12)
        return false;
    for (std::size_t i = 0; i < h.a.size(); ++i)
        if (std::abs(h.a[i] - g.a[i]) > 1e-12)
            return false;
    return true;
}

int rank_of(const std::vector<std::vector<double>>& rows, int dim, double tol_rank) {
    if (rows.empty())
        return 0;
    Eigen::MatrixXd m(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < dim; ++j)
            m(i, j) = rows[i][j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    double thresh = tol_rank * std::max(1.0, svd.singularValues()(0));
    int r = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > thresh)
            ++r;
    return r;
}

} // namespace

HPolyhedron::HPolyhedron(int dim) : dim_(dim) {
    if (dim < 0)
        throw std::invalid_argument("HPolyhedron: negative dimension");
}

HPolyhedron::HPolyhedron(int dim, std::vector<Halfspace> halfspaces) : HPolyhedron(dim) {
    for (auto& h : halfspaces)
        add(std::move(h));
}

void HPolyhedron::add(Halfspace h) {
    if (static_cast<int>(h.a.size()) != dim_)
        throw std::invalid_argument("HPolyhedron: halfspace dimension mismatch");
    if (dim_ == 0) {
        if (h.b > 0.0)
            hs_.push_back(std::move(h)); // "0 >= b" marker, set is empty
        return;
    }
    double n = norm2(h.a);
    if (n <= 1e-14)
        throw std::invalid_argument("HPolyhedron: zero normal vector");
    for (double& v : h.a)
        v /= n;
    h.b /= n;
    hs_.push_back(std::move(h));
}

HPolyhedron HPolyhedron::empty(int dim) {
    HPolyhedron p(dim);
    if (dim == 0) {
        p.hs_.push_back(Halfspace{{}, 1.0});
        return p;
    }
    Halfspace lo;
    lo.a.assign(dim, 0.0);
    lo.a[0] = 1.0;
    lo.b = 1.0;
    Halfspace hi;
    hi.a.assign(dim, 0.0);
    hi.a[0] = -1.0;
    hi.b = 0.0;
    p.add(std::move(lo));
    p.add(std::move(hi));
    return p;
}

HPolyhedron HPolyhedron::box(const std::vector<double>& lo, const std::vector<double>& hi) {
    int d = static_cast<int>(lo.size());
    if (hi.size() != lo.size())
        throw std::invalid_argument("HPolyhedron::box: bound size mismatch");
    HPolyhedron p(d);
    for (int k = 0; k < d; ++k) {
        Halfspace l;
        l.a.assign(d, 0.0);
        l.a[k] = 1.0;
        l.b = lo[k];
        Halfspace u;
        u.a.assign(d, 0.0);
        u.a[k] = -1.0;
        u.b = -hi[k];
        p.add(std::move(l));
        p.add(std::move(u));
    }
    return p;
}

bool HPolyhedron::contains(const std::vector<double>& x, double tol_mem) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("HPolyhedron::contains: point dimension mismatch");
    if (dim_ == 0)
        return hs_.empty();
    for (const auto& h : hs_)
        if (dot(h.a, x) < h.b - tol_mem)
            return false;
    return true;
}

double HPolyhedron::violation(const std::vector<double>& x) const {
    if (dim_ == 0)
        return hs_.empty() ? 0.0 : 1.0;
    double worst = 0.0;
    for (const auto& h : hs_)
        worst = std::max(worst, h.b - dot(h.a, x));
    return worst;
}

bool membership(const HPolyhedron& p, const std::vector<double>& x, const PolyConfig& cfg) {
    return p.contains(x, cfg.tol_mem);
}

HPolyhedron fourier_motzkin(const HPolyhedron& p, int var_index) {
    const int d = p.dim();
    if (d < 1)
        throw std::invalid_argument("fourier_motzkin: dimension must be >= 1");
    if (var_index < 0 || var_index >= d)
        throw std::invalid_argument("fourier_motzkin: variable index out of range");

    auto drop_coord = [&](const std::vector<double>& a) {
        std::vector<double> out;
        out.reserve(a.size() - 1);
        for (int i = 0; i < d; ++i)
            if (i != var_index)
                out.push_back(a[i]);
        return out;
    };

    std::vector<const Halfspace*> lowers, uppers;
    std::vector<Halfspace> raw;
    for (const auto& h : p.halfspaces()) {
        double c = h.a[var_index];
        if (c > 1e-11)
            lowers.push_back(&h);
        else if (c < -1e-11)
            uppers.push_back(&h);
        else
            raw.push_back(Halfspace{drop_coord(h.a), h.b});
    }
    for (const auto* l : lowers) {
        for (const auto* u : uppers) {
            double wl = -u->a[var_index]; // > 0
            double wu = l->a[var_index];  // > 0
            std::vector<double> a(d);
            for (int i = 0; i < d; ++i)
                a[i] = wl * l->a[i] + wu * u->a[i];
            raw.push_back(Halfspace{drop_coord(a), wl * l->b + wu * u->b});
        }
    }

    HPolyhedron out(d - 1);
    for (auto& h : raw) {
        double n = norm2(h.a);
        if (n <= 1e-10) {
            if (h.b > 1e-10)
                return HPolyhedron::empty(d - 1); // 0 >= positive: projection is empty
            continue;
        }
        for (double& v : h.a)
            v /= n;
        h.b /= n;
        bool dup = false;
        for (const auto& g : out.halfspaces())
            if (near_duplicate(h, g)) {
                dup = true;
                break;
            }
        if (!dup)
            out.add(std::move(h));
    }

    // p inequalities combine into at most p^2 before pruning
    if (out.size() > p.size() * p.size())
        throw std::logic_error("fourier_motzkin: combination count exceeds p^2");
    return out;
}

bool is_empty(const HPolyhedron& p) {
    if (p.dim() == 0)
        return !p.halfspaces().empty();
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const auto& h : p.halfspaces()) {
        rows.push_back(h.a);
        rhs.push_back(h.b);
    }
    std::vector<double> zero(p.dim(), 0.0);
    return lp_solve(zero, rows, rhs).status == LpStatus::Infeasible;
}

HPolyhedron remove_redundancy(const HPolyhedron& p) {
    if (p.dim() == 0)
        return p.halfspaces().empty() ? p : HPolyhedron::empty(0);

    std::vector<Halfspace> kept;
    for (const auto& h : p.halfspaces()) {
        bool dup = false;
        for (const auto& g : kept)
            if (near_duplicate(h, g)) {
                dup = true;
                break;
            }
        if (!dup)
            kept.push_back(h);
    }

    // Drop inequality i when min <a_i, x> over the others still meets b_i.
    for (std::size_t i = 0; i < kept.size();) {
        std::vector<std::vector<double>> rows;
        std::vector<double> rhs;
        for (std::size_t j = 0; j < kept.size(); ++j) {
            if (j == i)
                continue;
            rows.push_back(kept[j].a);
            rhs.push_back(kept[j].b);
        }
        std::vector<double> neg(kept[i].a.size());
        for (std::size_t k = 0; k < neg.size(); ++k)
            neg[k] = -kept[i].a[k];
        LpResult r = lp_solve(neg, rows, rhs);
        bool redundant;
        if (r.status == LpStatus::Infeasible)
            redundant = true; // remaining system already empty
        else if (r.status == LpStatus::Unbounded)
            redundant = false;
        else
            redundant = (-r.value >= kept[i].b - 1e-9);
        if (redundant)
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
        else
            ++i;
    }

    HPolyhedron out(p.dim());
    for (auto& h : kept)
        out.add(std::move(h));
    return out;
}

Face minimal_face(const HPolyhedron& p, const std::vector<double>& x, const PolyConfig& cfg) {
    if (!p.contains(x, cfg.tol_mem))
        throw std::invalid_argument("minimal_face: point is not in the polyhedron");
    Face f;
    f.parent = p;
    std::vector<std::vector<double>> tight_normals;
    const auto& hs = p.halfspaces();
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (std::abs(dot(hs[i].a, x) - hs[i].b) <= cfg.tol_tight) {
            f.tight_set.push_back(static_cast<int>(i));
            tight_normals.push_back(hs[i].a);
        }
    }
    f.dim = p.dim() - rank_of(tight_normals, p.dim(), cfg.tol_rank);
    return f;
}

HPolyhedron linear_image(const HPolyhedron& p, const std::vector<std::vector<double>>& T) {
    const int d = p.dim();
    const int m_out = static_cast<int>(T.size());
    if (m_out == 0)
        throw std::invalid_argument("linear_image: empty map");
    for (const auto& row : T)
        if (static_cast<int>(row.size()) != d)
            throw std::invalid_argument("linear_image: map column count mismatch");

    Eigen::MatrixXd tm(m_out, d);
    for (int i = 0; i < m_out; ++i)
        for (int j = 0; j < d; ++j)
            tm(i, j) = T[i][j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(tm, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    double thresh = 1e-10 * std::max(1.0, smax);
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > thresh)
            ++rank;

    if (rank == 0) {
        if (is_empty(p))
            return HPolyhedron::empty(m_out);
        std::vector<double> z(m_out, 0.0);
        return HPolyhedron::box(z, z); // image is the origin
    }

    // Rotate so that ker(T) spans the trailing coordinates: x = V z.
    const Eigen::MatrixXd v = svd.matrixV();
    HPolyhedron rotated(d);
    for (const auto& h : p.halfspaces()) {
        Eigen::VectorXd a(d);
        for (int j = 0; j < d; ++j)
            a(j) = h.a[j];
        Eigen::VectorXd az = v.transpose() * a;
        Halfspace nh;
        nh.a.assign(az.data(), az.data() + d);
        nh.b = h.b;
        rotated.add(std::move(nh));
    }

    // Eliminate the d - rank kernel coordinates, pruning after each step.
    const std::size_t p_count = p.size();
    HPolyhedron proj = std::move(rotated);
    for (int coord = d - 1; coord >= rank; --coord) {
        proj = remove_redundancy(fourier_motzkin(proj, coord));
    }

    // Prop 8 bound on the projection: p^(2^(d - rank)) inequalities.
    if (p_count >= 2 && !proj.halfspaces().empty()) {
        long double lhs = std::log2(static_cast<long double>(proj.size()));
        long double rhs = std::pow(2.0L, d - rank) * std::log2(static_cast<long double>(p_count));
        if (lhs > rhs + 1e-9L)
            throw std::logic_error("linear_image: projection exceeds the p^(2^d) bound");
    }

    // y = B z1 with B = T V1 injective; translate constraints through B's
    // pseudo-inverse and pin the image subspace.
    Eigen::MatrixXd b = tm * v.leftCols(rank);
    Eigen::MatrixXd pinv = (b.transpose() * b).ldlt().solve(b.transpose());

    HPolyhedron out(m_out);
    for (const auto& h : proj.halfspaces()) {
        Eigen::VectorXd g(rank);
        for (int j = 0; j < rank; ++j)
            g(j) = h.a[j];
        Eigen::VectorXd ay = pinv.transpose() * g;
        Halfspace nh;
        nh.a.assign(ay.data(), ay.data() + m_out);
        nh.b = h.b;
        out.add(std::move(nh));
    }
    const Eigen::MatrixXd u = svd.matrixU();
    for (int k = rank; k < m_out; ++k) {
        Halfspace pos, negh;
        pos.a.assign(m_out, 0.0);
        negh.a.assign(m_out, 0.0);
        for (int i = 0; i < m_out; ++i) {
            pos.a[i] = u(i, k);
            negh.a[i] = -u(i, k);
        }
        out.add(std::move(pos));
        out.add(std::move(negh));
    }
    return out;
}

std::optional<BoundingBox> bounding_box(const HPolyhedron& p) {
    const int d = p.dim();
    BoundingBox box;
    box.lo.assign(d, std::numeric_limits<double>::quiet_NaN());
    box.hi.assign(d, std::numeric_limits<double>::quiet_NaN());

    // Axis-aligned halfspaces give bounds without LP; the cone-approx
    // regions built by the pipeline have thousands of facets plus an
    // explicit box, and this path keeps them out of the simplex.
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
        double c = h.a[axis];
        if (c > 0.0) {
            double lo = h.b / c;
            if (std::isnan(box.lo[axis]) || lo > box.lo[axis])
                box.lo[axis] = lo;
        } else {
            double hi = h.b / c;
            if (std::isnan(box.hi[axis]) || hi < box.hi[axis])
                box.hi[axis] = hi;
        }
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    auto need_lp = [&]() {
        for (int k = 0; k < d; ++k)
            if (std::isnan(box.lo[k]) || std::isnan(box.hi[k]))
                return true;
        return false;
    };
    if (need_lp()) {
        for (const auto& h : p.halfspaces()) {
            rows.push_back(h.a);
            rhs.push_back(h.b);
        }
        for (int k = 0; k < d; ++k) {
            std::vector<double> obj(d, 0.0);
            if (std::isnan(box.hi[k])) {
                obj[k] = 1.0;
                LpResult r = lp_solve(obj, rows, rhs);
                if (r.status == LpStatus::Unbounded)
                    return std::nullopt;
                box.hi[k] = (r.status == LpStatus::Optimal) ? r.value : 0.0;
            }
            if (std::isnan(box.lo[k])) {
                obj[k] = -1.0;
                LpResult r = lp_solve(obj, rows, rhs);
                if (r.status == LpStatus::Unbounded)
                    return std::nullopt;
                box.lo[k] = (r.status == LpStatus::Optimal) ? -r.value : 0.0;
            }
        }
    }
    for (int k = 0; k < d; ++k)
        if (box.lo[k] > box.hi[k])
            box.lo[k] = box.hi[k] = 0.5 * (box.lo[k] + box.hi[k]);
    return box;
}

} // namespace conefact
