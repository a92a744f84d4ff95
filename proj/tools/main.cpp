#include "conefact/io.hpp"
#include "conefact/util.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

using namespace conefact;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotFound = 2;

struct CommonOpts {
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    std::string config_path;

    // tolerances and budgets, spec defaults
    double tol_feas = -1.0; // negative: 1e-6 * ||M||_inf
    double tol_mem = 1e-8;
    double tol_rank = 1e-8;
    double tol_psd = 1e-9;
    int starts = 64;
    int iters = 500;
    long max_partitions = 10000;
    double wall_clock = 300.0;
    int samples = 10000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "random seed (falls back to CONEFACT_SEED, then 0)");
    cmd->add_option("--threads", o.threads, "worker threads (default: machine parallelism)");
    cmd->add_option("--config", o.config_path, "JSON config file; values override flags");
    cmd->add_option("--tol-feas", o.tol_feas, "bilinear residual tolerance");
    cmd->add_option("--tol-mem", o.tol_mem, "membership tolerance");
    cmd->add_option("--tol-rank", o.tol_rank, "rank decision tolerance");
    cmd->add_option("--tol-psd", o.tol_psd, "PSD membership tolerance");
    cmd->add_option("--starts", o.starts, "oracle multistart count");
    cmd->add_option("--iters", o.iters, "oracle iteration cap per start");
    cmd->add_option("--max-partitions", o.max_partitions, "partition-pair budget");
    cmd->add_option("--wall-clock", o.wall_clock, "wall-clock budget per instance, seconds");
    cmd->add_option("--samples", o.samples, "Monte Carlo validation samples");
}

void apply_config(const CLI::App* cmd, CommonOpts& o) {
    if (o.config_path.empty())
        return;
    ordered_json cfg = load_json(o.config_path);
    auto set_d = [&](const char* key, double& slot) {
        if (cfg.contains(key))
            slot = cfg[key].get<double>();
    };
    auto set_i = [&](const char* key, auto& slot) {
        if (cfg.contains(key))
            slot = cfg[key].get<std::decay_t<decltype(slot)>>();
    };
    set_d("tol-feas", o.tol_feas);
    set_d("tol-mem", o.tol_mem);
    set_d("tol-rank", o.tol_rank);
    set_d("tol-psd", o.tol_psd);
    set_i("starts", o.starts);
    set_i("iters", o.iters);
    set_i("max-partitions", o.max_partitions);
    set_d("wall-clock", o.wall_clock);
    set_i("samples", o.samples);
    set_i("threads", o.threads);
    if (cfg.contains("seed")) {
        o.seed = cfg["seed"].get<std::uint64_t>();
        o.seed_given = true;
    }
    (void)cmd;
}

void resolve_seed(const CLI::App* cmd, CommonOpts& o) {
    if (cmd->count("--seed"))
        o.seed_given = true;
    if (!o.seed_given) {
        if (const char* env = std::getenv("CONEFACT_SEED")) {
            o.seed = std::strtoull(env, nullptr, 10);
            o.seed_given = true;
        }
    }
    if (o.threads <= 0)
        o.threads = default_thread_count();
}

ordered_json config_echo(const CommonOpts& o) {
    ordered_json j;
    j["tol_feas"] = o.tol_feas;
    j["tol_mem"] = o.tol_mem;
    j["tol_rank"] = o.tol_rank;
    j["tol_psd"] = o.tol_psd;
    j["starts"] = o.starts;
    j["iters"] = o.iters;
    j["max_partitions"] = o.max_partitions;
    j["wall_clock_s"] = o.wall_clock;
    j["samples"] = o.samples;
    j["threads"] = o.threads;
    return j;
}

FactorBudget make_budget(const CommonOpts& o) {
    FactorBudget b;
    b.max_partitions = o.max_partitions;
    b.wall_clock_s = o.wall_clock;
    b.oracle.starts = o.starts;
    b.oracle.iters = o.iters;
    b.oracle.tol_feas = o.tol_feas;
    b.oracle.tol_mem = o.tol_mem;
    b.oracle.seed = o.seed;
    b.oracle.threads = o.threads;
    return b;
}

int emit(RunReport& report, const std::chrono::steady_clock::time_point& t0, int code) {
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << report_to_json(report).dump(2) << std::endl;
    std::cerr << "[conefact] " << report.command << ": " << report.outcome << " in "
              << report.wall_time_s << " s" << std::endl;
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyhedral and approximate PSD matrix factorizations"};
    app.require_subcommand(1);

    CommonOpts opts;

    // cover
    auto* cover = app.add_subcommand("cover", "build and validate a covering of the PSD cap");
    int cover_r = 2;
    double cover_eps = 0.5;
    std::string cover_out = "covering.json";
    cover->add_option("--r", cover_r, "matrix side")->required();
    cover->add_option("--epsilon", cover_eps, "covering radius (Frobenius)")->required();
    cover->add_option("--out", cover_out, "output covering JSON");
    add_common(cover, opts);

    // approx-cone
    auto* approx = app.add_subcommand("approx-cone", "emit the polyhedral cone approximation");
    int approx_r = 2;
    double approx_eps = 0.5;
    std::string approx_covering, approx_out = "cone.json";
    approx->add_option("--r", approx_r, "matrix side");
    approx->add_option("--epsilon", approx_eps, "approximation parameter");
    approx->add_option("--covering", approx_covering, "use an existing covering JSON");
    approx->add_option("--out", approx_out, "output polyhedron JSON");
    add_common(approx, opts);

    // factor-poly
    auto* fpoly = app.add_subcommand("factor-poly", "exact factorization inside a polyhedron");
    std::string fpoly_matrix, fpoly_poly, fpoly_out = "factors.json";
    int fpoly_dim = 1;
    fpoly->add_option("--matrix", fpoly_matrix, "matrix CSV")->required();
    fpoly->add_option("--polyhedron", fpoly_poly, "polyhedron JSON")->required();
    fpoly->add_option("--dim", fpoly_dim, "inner dimension d")->required();
    fpoly->add_option("--out", fpoly_out, "output factor JSON");
    add_common(fpoly, opts);

    // factor-psd
    auto* fpsd = app.add_subcommand("factor-psd", "approximate PSD factorization");
    std::string fpsd_matrix, fpsd_out = "factors.json";
    int fpsd_rank = 1;
    double fpsd_eps = 0.25;
    double fpsd_fr = 1.0;
    fpsd->add_option("--matrix", fpsd_matrix, "matrix CSV")->required();
    fpsd->add_option("--rank", fpsd_rank, "PSD rank r")->required();
    fpsd->add_option("--epsilon", fpsd_eps, "requested relative error")->required();
    fpsd->add_option("--f-r", fpsd_fr, "norm-equivalence constant f(r)");
    fpsd->add_option("--out", fpsd_out, "output factor JSON");
    add_common(fpsd, opts);

    // nmf
    auto* nmf = app.add_subcommand("nmf", "factor-poly over a box-truncated orthant");
    std::string nmf_matrix, nmf_out = "factors.json";
    int nmf_dim = 1;
    double nmf_box = -1.0;
    nmf->add_option("--matrix", nmf_matrix, "matrix CSV")->required();
    nmf->add_option("--dim", nmf_dim, "inner dimension d")->required();
    nmf->add_option("--box", nmf_box, "box bound (default sqrt(||M||_inf))");
    nmf->add_option("--out", nmf_out, "output factor JSON");
    add_common(nmf, opts);

    // verify
    auto* verify = app.add_subcommand("verify", "recompute factorization errors");
    std::string verify_matrix, verify_factors;
    verify->add_option("--matrix", verify_matrix, "matrix CSV")->required();
    verify->add_option("--factors", verify_factors, "factor JSON")->required();
    add_common(verify, opts);

    // gen-fixture
    auto* gen = app.add_subcommand("gen-fixture", "generate a planted PSD instance");
    int gen_r = 1, gen_n = 3, gen_m = 3;
    std::string gen_matrix = "fixture.csv", gen_factors;
    gen->add_option("--r", gen_r, "PSD side")->required();
    gen->add_option("--n", gen_n, "rows");
    gen->add_option("--m", gen_m, "columns");
    gen->add_option("--out-matrix", gen_matrix, "output matrix CSV");
    gen->add_option("--out-factors", gen_factors, "output planted factors JSON");
    add_common(gen, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    CLI::App* active = app.get_subcommands().front();
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.command = active->get_name();

    try {
        apply_config(active, opts);
        resolve_seed(active, opts);
        report.seed = opts.seed;
        report.config = config_echo(opts);
        if (!opts.config_path.empty())
            report.inputs.emplace_back(opts.config_path, file_hash(opts.config_path));

        if (active == cover) {
            report.config["r"] = cover_r;
            report.config["epsilon"] = cover_eps;
            PsdGeomConfig geom;
            geom.n_samples = opts.samples;
            geom.threads = opts.threads;
            geom.tol_psd = opts.tol_psd;
            try {
                Covering cov = build_covering(cover_r, cover_eps, opts.seed, geom);
                save_json(cover_out, covering_to_json(cov));
                report.outcome = "ok";
                report.output_path = cover_out;
                report.config["covering_size"] = cov.points.size();
                report.config["max_observed_gap"] = cov.validation.max_observed_gap;
                return emit(report, t0, kExitOk);
            } catch (const CoveringError& e) {
                report.outcome = "error";
                report.config["achieved_radius"] = e.achieved_radius;
                std::cerr << "[conefact] " << e.what() << std::endl;
                return emit(report, t0, kExitError);
            }
        }

        if (active == approx) {
            Covering cov;
            if (!approx_covering.empty()) {
                report.inputs.emplace_back(approx_covering, file_hash(approx_covering));
                cov = covering_from_json(load_json(approx_covering));
            } else {
                PsdGeomConfig geom;
                geom.n_samples = opts.samples;
                geom.threads = opts.threads;
                geom.tol_psd = opts.tol_psd;
                cov = build_covering(approx_r, approx_eps, opts.seed, geom);
            }
            report.config["r"] = cov.r;
            report.config["epsilon"] = cov.epsilon;
            ConeApprox cone = build_cone_approx(cov);
            save_json(approx_out, polyhedron_to_json(cone.polyhedron));
            report.outcome = "ok";
            report.output_path = approx_out;
            return emit(report, t0, kExitOk);
        }

        if (active == fpoly || active == nmf) {
            std::string matrix_path = (active == fpoly) ? fpoly_matrix : nmf_matrix;
            report.inputs.emplace_back(matrix_path, file_hash(matrix_path));
            auto m = load_matrix_csv(matrix_path);

            FactorInstance instance;
            instance.m = m;
            instance.budget = make_budget(opts);
            instance.tol_rank = opts.tol_rank;
            if (active == fpoly) {
                report.inputs.emplace_back(fpoly_poly, file_hash(fpoly_poly));
                instance.p = polyhedron_from_json(load_json(fpoly_poly));
                instance.d = fpoly_dim;
            } else {
                double delta = 0.0;
                for (const auto& row : m)
                    for (double v : row)
                        delta = std::max(delta, std::abs(v));
                double bound = nmf_box > 0.0 ? nmf_box : std::sqrt(delta);
                instance.d = nmf_dim;
                instance.p = HPolyhedron::box(std::vector<double>(nmf_dim, 0.0),
                                              std::vector<double>(nmf_dim, bound));
                report.config["box"] = bound;
            }
            report.config["dim"] = instance.d;

            auto result = factor_in_polyhedron(instance);
            if (!result) {
                report.outcome = "not_found";
                return emit(report, t0, kExitNotFound);
            }
            std::string out_path = (active == fpoly) ? fpoly_out : nmf_out;
            save_json(out_path, factor_pair_to_json(*result));
            report.outcome = "ok";
            report.output_path = out_path;
            report.achieved_error = result->residual;
            return emit(report, t0, kExitOk);
        }

        if (active == fpsd) {
            report.inputs.emplace_back(fpsd_matrix, file_hash(fpsd_matrix));
            auto m = load_matrix_csv(fpsd_matrix);
            PipelineConfig cfg;
            cfg.r = fpsd_rank;
            cfg.epsilon = fpsd_eps;
            cfg.f_r = fpsd_fr;
            cfg.seed = opts.seed;
            cfg.budget = make_budget(opts);
            cfg.tol_psd = opts.tol_psd;
            cfg.geom.n_samples = opts.samples;
            cfg.geom.threads = opts.threads;
            report.config["r"] = cfg.r;
            report.config["epsilon"] = cfg.epsilon;
            report.config["f_r"] = cfg.f_r;
            try {
                auto result = factor_psd(m, cfg);
                if (!result) {
                    report.outcome = "not_found";
                    return emit(report, t0, kExitNotFound);
                }
                save_json(fpsd_out, psd_factorization_to_json(*result));
                report.outcome = "ok";
                report.output_path = fpsd_out;
                report.achieved_error = result->achieved_error;
                return emit(report, t0, kExitOk);
            } catch (const GuaranteeViolation& e) {
                report.outcome = "guarantee_violation";
                report.achieved_error = e.achieved_error;
                std::cerr << "[conefact] " << e.what() << std::endl;
                return emit(report, t0, kExitNotFound);
            }
        }

        if (active == verify) {
            report.inputs.emplace_back(verify_matrix, file_hash(verify_matrix));
            report.inputs.emplace_back(verify_factors, file_hash(verify_factors));
            auto m = load_matrix_csv(verify_matrix);
            ordered_json fj = load_json(verify_factors);
            if (fj.contains("U_rows")) {
                PsdFactorization f = psd_factorization_from_json(fj);
                VerifyReport vr = verify_error(m, f);
                report.outcome = "ok";
                report.achieved_error = vr.relative_error;
                report.config["error_inf"] = vr.error_inf;
                report.config["relative_error"] = vr.relative_error;
                report.config["psd_violation"] = vr.psd_violation;
                report.config["project_u_ok"] = vr.project_u_ok;
                report.config["project_v_ok"] = vr.project_v_ok;
                return emit(report, t0, kExitOk);
            }
            FactorPair f = factor_pair_from_json(fj);
            double err = 0.0, delta = 0.0;
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = 0; j < m[i].size(); ++j) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < f.u_rows[i].size(); ++k)
                        s += f.u_rows[i][k] * f.v_cols[j][k];
                    err = std::max(err, std::abs(s - m[i][j]));
                    delta = std::max(delta, std::abs(m[i][j]));
                }
            report.outcome = "ok";
            report.achieved_error = delta > 0.0 ? err / delta : (err > 0.0 ? INFINITY : 0.0);
            report.config["error_inf"] = err;
            return emit(report, t0, kExitOk);
        }

        if (active == gen) {
            Fixture fx = gen_fixture(gen_r, gen_n, gen_m, opts.seed);
            save_matrix_csv(gen_matrix, fx.m);
            report.outcome = "ok";
            report.output_path = gen_matrix;
            report.config["r"] = gen_r;
            report.config["n"] = gen_n;
            report.config["m"] = gen_m;
            report.config["spectral_ratio"] = fx.spectral_ratio;
            report.config["spectral_bound_met"] = fx.spectral_bound_met;
            if (!gen_factors.empty()) {
                PsdFactorization planted;
                planted.r = gen_r;
                planted.u_rows = fx.planted_u;
                planted.v_cols = fx.planted_v;
                save_json(gen_factors, psd_factorization_to_json(planted));
            }
            return emit(report, t0, kExitOk);
        }

        report.outcome = "error";
        return emit(report, t0, kExitError);
    } catch (const std::exception& e) {
        report.outcome = "error";
        std::cerr << "[conefact] error: " << e.what() << std::endl;
        return emit(report, t0, kExitError);
    }
}
