#include "psdocalc/bmo.hpp"
#include "psdocalc/calculus.hpp"
#include "psdocalc/decay.hpp"
#include "psdocalc/experiment.hpp"
#include "psdocalc/expr.hpp"
#include "psdocalc/psido.hpp"
#include "psdocalc/sobolev.hpp"
#include "psdocalc/space.hpp"
#include "psdocalc/symbols.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

namespace py = pybind11;
using namespace psdocalc;

namespace {

// Space, operator and spectrum built together from one spec.
struct Model {
    std::shared_ptr<Setup> s;

    Model(const std::string& kind, int size, int size2, const std::string& measure, const std::string& op,
          const std::string& coefficient) {
        SpaceSpec spec{parse_space_kind(kind), size, size2, parse_measure_choice(measure)};
        s = std::make_shared<Setup>(make_setup(spec, op, coefficient));
    }

    const MetricMeasureSpace& space() const { return s->space; }
    const SpectralData& sd() const { return s->sd; }
};

py::dict decay_dict(const DecayReport& r) {
    py::dict d;
    d["model"] = to_string(r.model);
    d["C"] = r.C;
    d["c"] = r.c;
    d["exponent"] = r.exponent;
    d["r2"] = r.r2;
    d["max_ratio"] = r.max_ratio;
    d["lower_bound"] = r.lower_bound;
    py::list rows;
    for (const auto& row : r.rows)
        rows.append(py::make_tuple(row.t, row.distance, row.norm, row.ratio));
    d["rows"] = rows;
    return d;
}

py::dict norm_dict(const BlockNorm& b) {
    py::dict d;
    d["value"] = b.value;
    d["lower_bound"] = b.lower_bound;
    return d;
}

// Worker threads may call back into Python-defined symbols, which take the GIL themselves.
template <class F>
auto nogil(F&& f) {
    py::gil_scoped_release release;
    return f();
}

ClassParams params(double s, double rho, double delta, double m) { return {s, rho, delta, m}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pseudo-differential operators on graphs and fractal approximants.";
    m.attr("__version__") = kVersion;

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
    static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const InvalidArgument& e) {
            py::set_error(invalid, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<Model>(m, "Model")
        .def(py::init<const std::string&, int, int, const std::string&, const std::string&, const std::string&>(),
             py::arg("kind"), py::arg("size"), py::arg("size2") = 0, py::arg("measure") = "counting",
             py::arg("operator") = "graph_laplacian", py::arg("coefficient") = "1")
        .def_property_readonly("size", [](const Model& md) { return md.space().size(); })
        .def_property_readonly("diameter", [](const Model& md) { return md.space().diameter(); })
        .def_property_readonly("measure", [](const Model& md) { return md.space().measure(); })
        .def_property_readonly("matrix", [](const Model& md) { return md.s->op.matrix; })
        .def_property_readonly("eigenvalues", [](const Model& md) { return md.sd().eigenvalues; })
        .def_property_readonly("eigenvectors", [](const Model& md) { return md.sd().eigenvectors; })
        .def("dist", [](const Model& md, PointId x, PointId y) {
            md.space().check_point(x);
            md.space().check_point(y);
            return md.space().dist(x, y);
        })
        .def("ball", [](const Model& md, PointId c, double r) { return make_ball(md.space(), c, r).members; })
        .def("ball_volume", [](const Model& md, PointId c, double r) {
            md.space().check_point(c);
            return md.space().ball_volume(c, r);
        })
        .def("doubling", [](const Model& md) {
            auto p = doubling_profile(md.space());
            py::dict d;
            d["A2"] = p.A2;
            d["n"] = p.n;
            d["D"] = p.D;
            return d;
        })
        .def("to_json", [](const Model& md) { return space_to_json(md.space()).dump(); })
        .def("multiplier", [](const Model& md, const std::function<double(double)>& F, const Vec& f) {
            return nogil([&] { return multiplier_apply(md.sd(), F, f); });
        }, py::arg("F"), py::arg("f"))
        .def("semigroup", [](const Model& md, double t, const Vec& f) { return semigroup_apply(md.sd(), t, f); },
             py::arg("t"), py::arg("f"))
        .def("heat_decay", [](const Model& md, const std::vector<double>& t, double p, double q) {
            HeatDecayOptions opt;
            opt.p = p;
            opt.q = q;
            return decay_dict(heat_decay(md.sd(), md.space(), t, md.s->op.order_m, opt));
        }, py::arg("t"), py::arg("p") = 2.0, py::arg("q") = 2.0);

    py::class_<Symbol>(m, "Symbol")
        .def_property_readonly("description", &Symbol::description)
        .def_property_readonly("is_real", &Symbol::is_real)
        .def_property_readonly("params", [](const Symbol& s) {
            const auto& p = s.params();
            return py::make_tuple(p.s, p.rho, p.delta, p.m);
        })
        .def("__call__", [](const Symbol& s, PointId x, double xi) { return s(x, xi); })
        .def("on_spectrum", [](const Symbol& s, const Model& md) { return nogil([&] { return s.on_spectrum(md.sd()); }); })
        .def("conj", &Symbol::conj)
        .def("__add__", &Symbol::operator+)
        .def("__mul__", [](const Symbol& s, cdouble c) { return s.scaled(c); })
        .def("__rmul__", [](const Symbol& s, cdouble c) { return s.scaled(c); });

    m.def("expression_symbol", [](const std::string& text, const Model& md, double s, double rho, double delta,
                                  double mo) { return symbol_from_text(text, md.space(), params(s, rho, delta, mo)); },
          py::arg("text"), py::arg("model"), py::arg("s") = 0.0, py::arg("rho") = 1.0, py::arg("delta") = 0.0,
          py::arg("m") = 2.0);
    m.def("builtin_symbol", [](const std::string& id, const Model& md) { return builtin_symbol(id, md.space(), md.sd()); },
          py::arg("id"), py::arg("model"));
    m.def("builtin_symbol_ids", &builtin_symbol_ids);
    m.def("multiplier_symbol", [](std::function<double(double)> F) { return multiplier_symbol(std::move(F)); });
    m.def("constant_symbol", &constant_symbol);
    m.def("random_s11_symbol", [](const Model& md, std::uint64_t seed) { return random_s11_symbol(md.space(), md.sd(), seed); },
          py::arg("model"), py::arg("seed") = 0);

    m.def("parse_expression", [](const std::string& text) { return SymbolExpr::parse(text).to_string(); });

    m.def("apply", [](const Symbol& s, const Model& md, const CVec& f) { return nogil([&] { return apply(s, md.sd(), f); }); },
          py::arg("symbol"), py::arg("model"), py::arg("f"));
    m.def("kernel", [](const Symbol& s, const Model& md) { return nogil([&] { return kernel_matrix(s, md.sd()).K; }); });
    m.def("opnorm", [](const Symbol& s, const Model& md, double p, std::uint64_t seed) {
        return norm_dict(nogil([&] { return opnorm(s, md.sd(), p, seed); }));
    }, py::arg("symbol"), py::arg("model"), py::arg("p") = 2.0, py::arg("seed") = 0);
    m.def("adjoint_defect", [](const Symbol& s, const Model& md, double p) {
        return norm_dict(nogil([&] { return adjoint_defect(s, md.sd(), p); }));
    }, py::arg("symbol"), py::arg("model"), py::arg("p") = 2.0);
    m.def("seminorm", [](const Symbol& s, const Model& md, double alpha_max, int beta_max) {
        SeminormOptions opt;
        opt.alpha_max = alpha_max;
        opt.beta_max = beta_max;
        return nogil([&] { return seminorm(s, &md.sd(), opt).K; });
    }, py::arg("symbol"), py::arg("model"), py::arg("alpha_max") = 1.0, py::arg("beta_max") = 2);
    m.def("decompose_residual", [](const Symbol& s, const Model& md, int q, double t_min, int l_max) {
        const PartitionOfUnity pu(8, q);
        return nogil([&] {
            auto d = decompose(s, md.space().size(), pu, pu.grid(t_min), l_max, 4 * (l_max + 1));
            return reconstruct_residual(d, probe_grid(1e-2, d.band_hi(), 16));
        });
    }, py::arg("symbol"), py::arg("model"), py::arg("q") = 32, py::arg("t_min") = 1.0 / 128, py::arg("l_max") = 32);

    m.def("bmo_norm", [](const Model& md, const Vec& f, int M, std::vector<double> radii) {
        if (M <= 0)
            M = default_bmo_M(doubling_profile(md.space()).n);
        if (radii.empty())
            radii = default_bmo_radii(md.space());
        auto b = nogil([&] { return bmo_norm(md.sd(), md.space(), f, M, radii); });
        py::dict d;
        d["M"] = b.M;
        d["norm"] = b.norm;
        d["center"] = b.argmax_center;
        d["radius"] = b.argmax_radius;
        d["oscillation"] = b.oscillation;
        return d;
    }, py::arg("model"), py::arg("f"), py::arg("M") = 0, py::arg("radii") = std::vector<double>{});
    m.def("paraproduct", [](const Model& md, const Vec& g, const Vec& f, int M) {
        return paraproduct(md.sd(), g, f, M, default_paraproduct_grid(md.sd()));
    }, py::arg("model"), py::arg("g"), py::arg("f"), py::arg("M") = 2);

    m.def("sobolev_norm", [](const Model& md, const Vec& f, double s, double p) {
        return sobolev_norm(md.sd(), f, {s, p, OperatorTag::L, md.s->op.order_m});
    }, py::arg("model"), py::arg("f"), py::arg("s"), py::arg("p") = 2.0);
    m.def("mapping_test", [](const Symbol& sym, const Model& md, double s, double shift, double p) {
        return norm_dict(nogil([&] { return mapping_test(sym, md.sd(), md.sd(), s, shift, p, md.s->op.order_m); }));
    }, py::arg("symbol"), py::arg("model"), py::arg("s"), py::arg("shift") = 0.0, py::arg("p") = 2.0);
    m.def("embedding_check", [](const Model& md, const std::string& mode, int draws, std::uint64_t seed) {
        CheckOptions opt;
        opt.draws = draws;
        opt.seed = seed;
        py::list out;
        for (const auto& e : embedding_poincare_check(md.sd(), md.space(), parse_check_mode(mode), opt)) {
            py::dict d;
            d["M"] = e.M;
            d["C"] = e.C;
            d["center"] = e.witness.ball_center;
            d["radius"] = e.witness.radius;
            out.append(d);
        }
        return out;
    }, py::arg("model"), py::arg("mode") = "sobolev", py::arg("draws") = 32, py::arg("seed") = 7);

    m.def("recipes", &recipe_names);
    m.def("config_hash", [](const std::string& text) { return config_hash(config_from_json(nlohmann::json::parse(text))); });
    m.def("run", [](const std::string& config_json, const std::filesystem::path& dir) {
        const auto cfg = config_from_json(nlohmann::json::parse(config_json));
        auto res = nogil([&] { return run_experiment(cfg, dir); });
        py::dict d;
        d["dir"] = res.dir;
        d["files"] = res.files;
        d["passed"] = res.passed();
        py::list checks;
        for (const auto& c : res.checks)
            checks.append(py::make_tuple(c.name, c.value, c.bound, c.relation, c.pass));
        d["checks"] = checks;
        return d;
    }, py::arg("config_json"), py::arg("dir"));
    m.def("report", [](const std::filesystem::path& dir) { return report(dir).passed; });
}
