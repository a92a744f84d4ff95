#include "conefact/psd_pipeline.hpp"

#include "conefact/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace conefact {

namespace {

double max_abs(const std::vector<std::vector<double>>& m) {
    double v = 0.0;
    for (const auto& row : m)
        for (double x : row)
            v = std::max(v, std::abs(x));
    return v;
}

const ConeApprox& cached_cone_approx(int r, double epsilon, std::uint64_t seed,
                                     const PsdGeomConfig& geom, bool use_cache) {
    static std::mutex mutex;
    static std::map<std::tuple<int, long long, std::uint64_t>, ConeApprox> cache;
    static ConeApprox scratch;

    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_tuple(r, static_cast<long long>(epsilon * 1e15), seed);
    if (use_cache) {
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    ConeApprox approx = build_cone_approx(build_covering(r, epsilon, seed, geom));
    if (use_cache)
        return cache.emplace(key, std::move(approx)).first->second;
    scratch = std::move(approx);
    return scratch;
}

} // namespace

HPolyhedron build_feasible_region(int r, double epsilon_internal, double delta, double f_r,
                                  std::uint64_t seed, const PsdGeomConfig& geom,
                                  bool use_cache) {
    if (delta <= 0.0)
        throw std::invalid_argument("build_feasible_region: delta must be positive");
    const ConeApprox& approx = cached_cone_approx(r, epsilon_internal, seed, geom, use_cache);

    HPolyhedron region = approx.polyhedron;
    // Cube ||X||_inf <= R on matrix entries; off-diagonal svec coordinates
    // carry the sqrt(2) scaling.
    const double radius = f_r * std::sqrt(static_cast<double>(r) * delta);
    const double rt2 = std::sqrt(2.0);
    const int d = r * (r + 1) / 2;
    for (int k = 0; k < d; ++k) {
        double bound = (k < r) ? radius : rt2 * radius;
        Halfspace lo, hi;
        lo.a.assign(d, 0.0);
        hi.a.assign(d, 0.0);
        lo.a[k] = 1.0;
        lo.b = -bound;
        hi.a[k] = -1.0;
        hi.b = -bound;
        region.add(std::move(lo));
        region.add(std::move(hi));
    }
    return region;
}

std::optional<PsdFactorization> factor_psd(const std::vector<std::vector<double>>& m,
                                           const PipelineConfig& config) {
    const int r = config.r;
    if (r < 1)
        throw std::invalid_argument("factor_psd: r must be >= 1");
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
        throw std::invalid_argument("factor_psd: epsilon must lie in (0,1)");
    if (m.empty() || m[0].empty())
        throw std::invalid_argument("factor_psd: empty matrix");
    const int n = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    for (const auto& row : m) {
        if (static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("factor_psd: ragged matrix");
        for (double v : row)
            if (v < 0.0)
                throw std::invalid_argument("factor_psd: matrix must be nonnegative");
    }

    PsdFactorization out;
    out.r = r;
    out.epsilon_requested = config.epsilon;
    out.epsilon_internal = config.epsilon / (3.0 * config.f_r * r * r);

    const double delta = max_abs(m);
    if (delta == 0.0) {
        out.u_rows.assign(n, SymMat::zero(r));
        out.v_cols.assign(cols, SymMat::zero(r));
        const int d = r * (r + 1) / 2;
        out.u_raw.assign(n, std::vector<double>(d, 0.0));
        out.v_raw.assign(cols, std::vector<double>(d, 0.0));
        out.achieved_error = 0.0;
        return out;
    }

    // Solve the scale-normalized instance; the box radius is the only
    // scale-dependent quantity, so M/delta makes the search identical for
    // all positive rescalings of M.
    std::vector<std::vector<double>> normalized(n, std::vector<double>(cols));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cols; ++j)
            normalized[i][j] = m[i][j] / delta;

    FactorInstance instance;
    instance.m = std::move(normalized);
    instance.d = r * (r + 1) / 2;
    instance.p = build_feasible_region(r, out.epsilon_internal, 1.0, config.f_r, config.seed,
                                       config.geom, config.use_covering_cache);
    instance.budget = config.budget;
    instance.budget.oracle.seed = config.seed;

    std::optional<FactorPair> pair = factor_in_polyhedron(instance);
    if (!pair)
        return std::nullopt;

    const double scale = std::sqrt(delta);
    out.u_raw = pair->u_rows;
    out.v_raw = pair->v_cols;
    for (auto& u : out.u_raw)
        for (double& v : u)
            v *= scale;
    for (auto& vc : out.v_raw)
        for (double& v : vc)
            v *= scale;

    SymMatConfig eig_cfg;
    for (const auto& u : out.u_raw)
        out.u_rows.push_back(project_psd(smat(u), eig_cfg));
    for (const auto& v : out.v_raw)
        out.v_cols.push_back(project_psd(smat(v), eig_cfg));

    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cols; ++j)
            err = std::max(err, std::abs(m[i][j] - inner(out.u_rows[i], out.v_cols[j])));
    out.achieved_error = err / delta;

    VerifyReport report = verify_error(m, out);
    if (report.relative_error > config.epsilon) {
        std::ostringstream msg;
        msg << "factor_psd: factorization found but achieved error " << report.relative_error
            << " exceeds requested " << config.epsilon;
        throw GuaranteeViolation(msg.str(), report.relative_error);
    }
    return out;
}

VerifyReport verify_error(const std::vector<std::vector<double>>& m,
                          const PsdFactorization& f) {
    VerifyReport report;
    const int n = static_cast<int>(m.size());
    const int cols = n ? static_cast<int>(m[0].size()) : 0;
    if (static_cast<int>(f.u_rows.size()) != n || static_cast<int>(f.v_cols.size()) != cols)
        throw std::invalid_argument("verify_error: shape mismatch");

    double delta = max_abs(m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cols; ++j)
            report.error_inf =
                std::max(report.error_inf, std::abs(m[i][j] - inner(f.u_rows[i], f.v_cols[j])));
    report.relative_error = delta > 0.0 ? report.error_inf / delta
                                        : (report.error_inf > 0.0
                                               ? std::numeric_limits<double>::infinity()
                                               : 0.0);

    for (const auto& factors : {f.u_rows, f.v_cols}) {
        for (const auto& x : factors) {
            auto dec = eig(x);
            double lam_min = dec.eigenvalues.back();
            report.psd_violation = std::max(report.psd_violation, std::max(0.0, -lam_min));
        }
    }

    report.raw_factors_present = !f.u_raw.empty() && !f.v_raw.empty();
    if (report.raw_factors_present) {
        auto check_side = [&](const std::vector<std::vector<double>>& raw,
                              const std::vector<SymMat>& projected) {
            double diff_inf = 0.0, raw_inf = 0.0;
            for (std::size_t i = 0; i < raw.size(); ++i) {
                SymMat before = smat(raw[i]);
                SymMat delta_mat = before - projected[i];
                for (int a = 0; a < before.side(); ++a)
                    for (int b = a; b < before.side(); ++b) {
                        diff_inf = std::max(diff_inf, std::abs(delta_mat(a, b)));
                        raw_inf = std::max(raw_inf, std::abs(before(a, b)));
                    }
            }
            return diff_inf <= f.epsilon_internal * raw_inf + 1e-12;
        };
        report.project_u_ok = check_side(f.u_raw, f.u_rows);
        report.project_v_ok = check_side(f.v_raw, f.v_cols);
    }
    return report;
}

Fixture gen_fixture(int r, int n, int m, std::uint64_t seed) {
    if (r < 1 || r > 3 || n < 1 || n > 6 || m < 1 || m > 6)
        throw std::invalid_argument("gen_fixture: designed for r <= 3, n,m <= 6");
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto random_gram = [&]() {
        std::vector<std::vector<double>> g(r, std::vector<double>(r));
        for (auto& row : g)
            for (double& v : row)
                v = normal(rng);
        SymMat out(r);
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) {
                double s = 0.0;
                for (int k = 0; k < r; ++k)
                    s += g[i][k] * g[j][k];
                out.set(i, j, s);
            }
        return out;
    };

    Fixture fx;
    for (int i = 0; i < n; ++i)
        fx.planted_u.push_back(random_gram());
    for (int j = 0; j < m; ++j)
        fx.planted_v.push_back(random_gram());

    // Diagonal congruence A -> L A L, B -> L^-1 B L^-1 preserves all inner
    // products; a scalar L equalizes the two sides' max spectral norms.
    auto max_spectral = [](const std::vector<SymMat>& side) {
        double s = 0.0;
        for (const auto& x : side)
            s = std::max(s, norms(x).spectral);
        return s;
    };
    for (int iter = 0; iter < 50; ++iter) {
        double su = max_spectral(fx.planted_u);
        double sv = max_spectral(fx.planted_v);
        if (std::abs(su - sv) <= 0.1 * std::max(su, sv))
            break;
        double c2 = std::sqrt(sv / su);
        for (auto& a : fx.planted_u)
            a = a * c2;
        for (auto& b : fx.planted_v)
            b = b * (1.0 / c2);
    }

    fx.m.assign(n, std::vector<double>(m));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            fx.m[i][j] = inner(fx.planted_u[i], fx.planted_v[j]);

    double delta = max_abs(fx.m);
    double s = std::max(max_spectral(fx.planted_u), max_spectral(fx.planted_v));
    fx.spectral_ratio = delta > 0.0 ? s / std::sqrt(r * delta)
                                    : std::numeric_limits<double>::infinity();
    fx.spectral_bound_met = fx.spectral_ratio <= 1.0;
    return fx;
}

} // namespace conefact
