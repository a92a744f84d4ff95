#include "conefact/psd_geometry.hpp"

#include "conefact/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace conefact {

SymMat project_psd(const SymMat& c, const SymMatConfig& cfg) {
    SpectralDecomposition d = eig(c, cfg);
    for (double& lam : d.eigenvalues)
        lam = std::max(0.0, lam);
    return reconstruct(d);
}

DistanceWitness psd_distance_witness(const SymMat& x, const SymMatConfig& cfg) {
    SpectralDecomposition d = eig(x, cfg);
    double sq = 0.0;
    for (double lam : d.eigenvalues)
        if (lam < 0.0)
            sq += lam * lam;
    DistanceWitness out;
    out.delta = std::sqrt(sq);
    double scale = std::max(1.0, std::sqrt(inner(x, x)));
    if (out.delta <= 1e-12 * scale)
        return out;

    // witness = -N / ||N||_F where N is the negative spectral part
    SpectralDecomposition neg = d;
    for (double& lam : neg.eigenvalues)
        lam = lam < 0.0 ? -lam / out.delta : 0.0;
    out.witness = reconstruct(neg);
    return out;
}

SymMat random_gaussian_sym(int r, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    SymMat m(r);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j)
            m.set(i, j, normal(rng));
    return m;
}

SymMat sample_cap_point(int r, std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        SymMat p = project_psd(random_gaussian_sym(r, rng));
        double n = std::sqrt(inner(p, p));
        if (n > 1e-8)
            return p * (1.0 / n);
    }
    throw std::runtime_error("sample_cap_point: degenerate draws");
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

double dist_sq(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Uniform hash grid over svec coordinates for the thinning pass.
class NeighborGrid {
  public:
    NeighborGrid(int dim, double cell) : dim_(dim), cell_(cell) {}

    bool has_point_within(const std::vector<std::vector<double>>& pts,
                          const std::vector<double>& q, double radius) const {
        double r2 = radius * radius;
        std::vector<long> base(dim_);
        for (int k = 0; k < dim_; ++k)
            base[k] = static_cast<long>(std::floor(q[k] / cell_));
        std::vector<long> cur(dim_);
        return scan(pts, q, r2, base, cur, 0);
    }

    void insert(const std::vector<double>& p, int index) {
        cells_[key_of(p)].push_back(index);
    }

  private:
    std::vector<long> key_of(const std::vector<double>& p) const {
        std::vector<long> key(dim_);
        for (int k = 0; k < dim_; ++k)
            key[k] = static_cast<long>(std::floor(p[k] / cell_));
        return key;
    }

    bool scan(const std::vector<std::vector<double>>& pts, const std::vector<double>& q,
              double r2, const std::vector<long>& base, std::vector<long>& cur,
              int depth) const {
        if (depth == dim_) {
            auto it = cells_.find(cur);
            if (it == cells_.end())
                return false;
            for (int idx : it->second)
                if (dist_sq(pts[idx], q) < r2)
                    return true;
            return false;
        }
        for (long off = -1; off <= 1; ++off) {
            cur[depth] = base[depth] + off;
            if (scan(pts, q, r2, base, cur, depth + 1))
                return true;
        }
        return false;
    }

    int dim_;
    double cell_;
    std::map<std::vector<long>, std::vector<int>> cells_;
};

std::vector<std::vector<double>> candidate_net(int r, int d, long n_cand, double epsilon) {
    const double thin_radius = 0.5 * epsilon;
    std::vector<std::vector<double>> kept;
    NeighborGrid grid(d, thin_radius);

    for (long idx = 1; idx <= n_cand; ++idx) {
        std::vector<double> g(d);
        double norm = 0.0;
        for (int k = 0; k < d; ++k) {
            g[k] = inverse_normal_cdf(halton(static_cast<std::uint64_t>(idx), kPrimes[k]));
            norm += g[k] * g[k];
        }
        norm = std::sqrt(norm);
        if (norm < 1e-12)
            continue;
        for (double& v : g)
            v /= norm;

        SymMat proj = project_psd(smat(g));
        double pn = std::sqrt(inner(proj, proj));
        if (pn < 1e-6)
            continue; // direction in the polar cone, projection degenerate
        std::vector<double> sv = svec(proj * (1.0 / pn));

        if (!grid.has_point_within(kept, sv, thin_radius)) {
            grid.insert(sv, static_cast<int>(kept.size()));
            kept.push_back(std::move(sv));
        }
    }
    return kept;
}

double validate_covering(const std::vector<std::vector<double>>& pts, int r,
                         std::uint64_t seed, const PsdGeomConfig& cfg) {
    std::vector<double> gap(cfg.n_samples, 0.0);
    parallel_for(static_cast<std::size_t>(cfg.n_samples), cfg.threads, [&](std::size_t i) {
        auto rng = make_rng(seed, i);
        std::vector<double> sv = svec(sample_cap_point(r, rng));
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pts)
            best = std::min(best, dist_sq(p, sv));
        gap[i] = std::sqrt(best);
    });
    double worst = 0.0;
    for (double g : gap)
        worst = std::max(worst, g);
    return worst;
}

} // namespace

Covering build_covering(int r, double epsilon, std::uint64_t seed, const PsdGeomConfig& cfg) {
    if (r < 1)
        throw std::invalid_argument("build_covering: r must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("build_covering: epsilon must lie in (0,1)");

    Covering cov;
    cov.r = r;
    cov.epsilon = epsilon;

    if (r == 1) {
        // The cap is the single point [1].
        cov.points.push_back(SymMat::identity(1));
        cov.validation = {cfg.n_samples, 0.0};
        return cov;
    }

    const int d = r * (r + 1) / 2;
    if (d > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
        throw std::invalid_argument("build_covering: r too large for this artifact");

    long n_cand = cfg.initial_candidates;
    double achieved = std::numeric_limits<double>::infinity();
    for (int round = 0; round <= cfg.refine_cap; ++round, n_cand *= 2) {
        auto pts = candidate_net(r, d, n_cand, epsilon);
        if (pts.empty())
            continue;
        double gap = validate_covering(pts, r, seed, cfg);
        achieved = std::min(achieved, gap);
        if (gap < epsilon) {
            cov.points.reserve(pts.size());
            for (const auto& sv : pts)
                cov.points.push_back(smat(sv));
            cov.validation = {cfg.n_samples, gap};
            return cov;
        }
    }
    std::ostringstream msg;
    msg << "build_covering: validation failed after refinement cap; achieved radius "
        << achieved << " for requested " << epsilon;
    throw CoveringError(msg.str(), achieved);
}

ConeApprox build_cone_approx(const Covering& cov) {
    ConeApprox out;
    out.epsilon = cov.epsilon;
    out.source = cov;
    HPolyhedron poly(cov.r * (cov.r + 1) / 2);
    for (const auto& p : cov.points)
        poly.add(Halfspace{svec(p), 0.0});
    out.polyhedron = std::move(poly);
    return out;
}

std::vector<double> sample_cone_member(const ConeApprox& approx, std::mt19937_64& rng) {
    const int d = approx.polyhedron.dim();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (long attempt = 0; attempt < 2000000; ++attempt) {
        std::vector<double> x(d);
        for (double& v : x)
            v = unif(rng);
        bool ok = true;
        for (const auto& h : approx.polyhedron.halfspaces()) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
                s += h.a[k] * x[k];
            if (s < 0.0) {
                ok = false;
                break;
            }
        }
        if (ok)
            return x;
    }
    throw std::runtime_error("sample_cone_member: rejection sampling exhausted");
}

} // namespace conefact
