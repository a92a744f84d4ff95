#include "conefact/factorizer.hpp"
#include "conefact/partition.hpp"
#include "conefact/psd_geometry.hpp"
#include "conefact/psd_pipeline.hpp"
#include "conefact/symmat.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace conefact;

namespace {

using Dense = std::vector<std::vector<double>>;

SymMat sym_from_dense(const Dense& rows) {
    int r = static_cast<int>(rows.size());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(r) * r);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != r)
            throw std::invalid_argument("expected a square matrix");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return SymMat::from_dense(r, flat);
}

Dense sym_to_dense(const SymMat& m) {
    Dense out(m.side(), std::vector<double>(m.side()));
    auto flat = m.dense_rowmajor();
    for (int i = 0; i < m.side(); ++i)
        for (int j = 0; j < m.side(); ++j)
            out[i][j] = flat[i * m.side() + j];
    return out;
}

HPolyhedron poly_from_pairs(int dim, const std::vector<std::pair<std::vector<double>, double>>& hs) {
    HPolyhedron p(dim);
    for (const auto& [a, b] : hs)
        p.add(Halfspace{a, b});
    return p;
}

std::vector<std::pair<std::vector<double>, double>> poly_to_pairs(const HPolyhedron& p) {
    std::vector<std::pair<std::vector<double>, double>> out;
    for (const auto& h : p.halfspaces())
        out.emplace_back(h.a, h.b);
    return out;
}

} // namespace

PYBIND11_MODULE(_conefact, m) {
    m.doc() = "polyhedral and approximate PSD matrix factorizations";

    py::class_<HPolyhedron>(m, "HPolyhedron")
        .def(py::init(&poly_from_pairs), py::arg("dim"), py::arg("halfspaces"))
        .def_property_readonly("dim", &HPolyhedron::dim)
        .def_property_readonly("halfspaces", &poly_to_pairs)
        .def("contains", &HPolyhedron::contains, py::arg("x"), py::arg("tol") = 1e-8)
        .def("violation", &HPolyhedron::violation, py::arg("x"))
        .def_static("box", &HPolyhedron::box, py::arg("lo"), py::arg("hi"));

    m.def("membership",
          [](const HPolyhedron& p, const std::vector<double>& x) { return membership(p, x); });
    m.def("fourier_motzkin", &fourier_motzkin, py::arg("p"), py::arg("var_index"));
    m.def("linear_image", &linear_image, py::arg("p"), py::arg("T"));
    m.def("remove_redundancy", &remove_redundancy);
    m.def("minimal_face", [](const HPolyhedron& p, const std::vector<double>& x) {
        Face f = minimal_face(p, x);
        return py::make_tuple(f.tight_set, f.dim);
    });

    m.def("inner",
          [](const Dense& a, const Dense& b) { return inner(sym_from_dense(a), sym_from_dense(b)); });
    m.def("norms", [](const Dense& a) {
        MatNorms n = norms(sym_from_dense(a));
        return py::make_tuple(n.inf, n.frob, n.spectral);
    });
    m.def("eig", [](const Dense& a) {
        auto d = eig(sym_from_dense(a));
        return py::make_tuple(d.eigenvalues, d.vectors, d.residual);
    });
    m.def("svec", [](const Dense& a) { return svec(sym_from_dense(a)); });
    m.def("smat", [](const std::vector<double>& v) { return sym_to_dense(smat(v)); });

    m.def("project_psd", [](const Dense& a) { return sym_to_dense(project_psd(sym_from_dense(a))); });
    m.def("psd_distance_witness", [](const Dense& a) {
        DistanceWitness w = psd_distance_witness(sym_from_dense(a));
        return py::make_tuple(w.delta,
                              w.witness ? py::cast(sym_to_dense(*w.witness)) : py::none());
    });

    m.def(
        "build_covering",
        [](int r, double epsilon, std::uint64_t seed, int samples) {
            PsdGeomConfig cfg;
            cfg.n_samples = samples;
            Covering cov = build_covering(r, epsilon, seed, cfg);
            std::vector<std::vector<double>> pts;
            for (const auto& p : cov.points)
                pts.push_back(svec(p));
            return py::make_tuple(pts, cov.validation.max_observed_gap);
        },
        py::arg("r"), py::arg("epsilon"), py::arg("seed") = 0, py::arg("samples") = 10000);

    m.def(
        "build_cone_approx",
        [](int r, double epsilon, std::uint64_t seed, int samples) {
            PsdGeomConfig cfg;
            cfg.n_samples = samples;
            return build_cone_approx(build_covering(r, epsilon, seed, cfg)).polyhedron;
        },
        py::arg("r"), py::arg("epsilon"), py::arg("seed") = 0, py::arg("samples") = 10000);

    m.def(
        "enumerate_partitions",
        [](const std::vector<std::vector<double>>& points, int k1, int k2, int limit) {
            PartitionStream stream(points, k1, k2);
            std::vector<std::vector<std::vector<int>>> out;
            while (static_cast<int>(out.size()) < limit) {
                auto p = stream.next();
                if (!p)
                    break;
                out.push_back(p->parts);
            }
            return out;
        },
        py::arg("points"), py::arg("k1"), py::arg("k2"), py::arg("limit") = 100000);

    m.def(
        "factor_in_polyhedron",
        [](const Dense& matrix, const HPolyhedron& p, int d, std::uint64_t seed,
           long max_partitions, double wall_clock_s, int starts)
            -> std::optional<py::tuple> {
            FactorInstance inst;
            inst.m = matrix;
            inst.p = p;
            inst.d = d;
            inst.budget.max_partitions = max_partitions;
            inst.budget.wall_clock_s = wall_clock_s;
            inst.budget.oracle.starts = starts;
            inst.budget.oracle.seed = seed;
            auto r = factor_in_polyhedron(inst);
            if (!r)
                return std::nullopt;
            return py::make_tuple(r->u_rows, r->v_cols, r->residual, r->membership_violation);
        },
        py::arg("matrix"), py::arg("polyhedron"), py::arg("d"), py::arg("seed") = 0,
        py::arg("max_partitions") = 10000, py::arg("wall_clock_s") = 300.0,
        py::arg("starts") = 64);

    m.def(
        "factor_psd",
        [](const Dense& matrix, int r, double epsilon, std::uint64_t seed,
           int samples) -> std::optional<py::dict> {
            PipelineConfig cfg;
            cfg.r = r;
            cfg.epsilon = epsilon;
            cfg.seed = seed;
            cfg.geom.n_samples = samples;
            auto f = factor_psd(matrix, cfg);
            if (!f)
                return std::nullopt;
            py::dict out;
            std::vector<Dense> urows, vcols;
            for (const auto& u : f->u_rows)
                urows.push_back(sym_to_dense(u));
            for (const auto& v : f->v_cols)
                vcols.push_back(sym_to_dense(v));
            out["U_rows"] = urows;
            out["V_cols"] = vcols;
            out["achieved_error"] = f->achieved_error;
            out["epsilon_requested"] = f->epsilon_requested;
            out["epsilon_internal"] = f->epsilon_internal;
            return out;
        },
        py::arg("matrix"), py::arg("r"), py::arg("epsilon"), py::arg("seed") = 0,
        py::arg("samples") = 10000);

    m.def(
        "gen_fixture",
        [](int r, int n, int mm, std::uint64_t seed) {
            Fixture fx = gen_fixture(r, n, mm, seed);
            std::vector<Dense> u, v;
            for (const auto& a : fx.planted_u)
                u.push_back(sym_to_dense(a));
            for (const auto& b : fx.planted_v)
                v.push_back(sym_to_dense(b));
            return py::make_tuple(fx.m, u, v, fx.spectral_ratio);
        },
        py::arg("r"), py::arg("n"), py::arg("m"), py::arg("seed") = 0);

    m.attr("__version__") = "0.1.0";
}
