#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qgp/board.hpp"
#include "qgp/bounds.hpp"
#include "qgp/errors.hpp"
#include "qgp/harness.hpp"
#include "qgp/kernels.hpp"
#include "qgp/nbody.hpp"
#include "qgp/nls.hpp"

namespace py = pybind11;
using namespace qgp;

namespace {

Field to_field(const py::array_t<cplx>& a) {
    Field f(static_cast<std::size_t>(a.size()));
    auto r = a.unchecked();
    std::size_t idx = 0;
    if (a.ndim() == 1) {
        for (py::ssize_t i = 0; i < a.shape(0); ++i) f[idx++] = r(i);
    } else if (a.ndim() == 2) {
        for (py::ssize_t i = 0; i < a.shape(0); ++i)
            for (py::ssize_t j = 0; j < a.shape(1); ++j) f[idx++] = r(i, j);
    } else {
        throw ValidationError("expected a 1- or 2-dimensional complex array");
    }
    return f;
}

py::array_t<cplx> from_field(const Field& f, const GridSpec& g) {
    if (g.d == 1) {
        py::array_t<cplx> out(static_cast<py::ssize_t>(f.size()));
        std::copy(f.begin(), f.end(), out.mutable_data());
        return out;
    }
    py::array_t<cplx> out({static_cast<py::ssize_t>(g.M), static_cast<py::ssize_t>(g.M)});
    std::copy(f.begin(), f.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_qgplab, m) {
    m.doc() = "spectral N-body / hierarchy / board-game laboratory core";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](int d, int M, double L) {
                 GridSpec g{d, M, L};
                 g.validate();
                 return g;
             }),
             py::arg("d"), py::arg("M"), py::arg("L"))
        .def_readonly("d", &GridSpec::d)
        .def_readonly("M", &GridSpec::M)
        .def_readonly("L", &GridSpec::L)
        .def_property_readonly("h", &GridSpec::h)
        .def_property_readonly("size", &GridSpec::size);

    m.def("transform_forward", [](const py::array_t<cplx>& f, const GridSpec& g) {
        return from_field(transform_forward(to_field(f), g), g);
    });
    m.def("transform_inverse", [](const py::array_t<cplx>& f, const GridSpec& g) {
        return from_field(transform_inverse(to_field(f), g), g);
    });
    m.def("sobolev_norm", [](const py::array_t<cplx>& f, double alpha, const GridSpec& g) {
        return sobolev_norm(to_field(f), alpha, g);
    });
    m.def("apply_sobolev", [](const py::array_t<cplx>& f, double alpha, const GridSpec& g) {
        return from_field(apply_multiplier(to_field(f), SpectralMultiplier::sobolev(g, alpha), g),
                          g);
    });
    m.def("apply_free_flow", [](const py::array_t<cplx>& f, double t, const GridSpec& g) {
        return from_field(apply_multiplier(to_field(f), SpectralMultiplier::free_flow(g, t), g),
                          g);
    });

    py::class_<NlsParams>(m, "NlsParams")
        .def(py::init([](double b0, double lambda2, double lambda3, double dt) {
                 NlsParams p{b0, lambda2, lambda3, dt};
                 p.validate();
                 return p;
             }),
             py::arg("b0") = 0.0, py::arg("lambda2") = 0.0, py::arg("lambda3") = 0.0,
             py::arg("dt") = 1e-3)
        .def_readonly("b0", &NlsParams::b0)
        .def_readonly("dt", &NlsParams::dt);

    m.def(
        "evolve_nls",
        [](const py::array_t<cplx>& phi0, const GridSpec& g, const NlsParams& p, double T,
           int record_every) {
            const auto traj = evolve(WaveFunction{g, to_field(phi0), 0.0}, p, T, record_every);
            py::list out;
            for (const auto& s : traj)
                out.append(py::make_tuple(s.t, from_field(s.values, g), mass(s), energy(s, p)));
            return out;
        },
        py::arg("phi0"), py::arg("grid"), py::arg("params"), py::arg("T"),
        py::arg("record_every") = 1);

    py::class_<SeparableKernel>(m, "SeparableKernel")
        .def_readonly("order", &SeparableKernel::order)
        .def_property_readonly("rank", &SeparableKernel::rank);

    m.def("factorized", [](const py::array_t<cplx>& phi, const GridSpec& g, int k) {
        return factorized(to_field(phi), g, k);
    });
    m.def("free_propagate", &free_propagate);
    m.def("contract", &contract);
    m.def("contract_plus", &contract_plus);
    m.def("contract_minus", &contract_minus);
    m.def("kernel_norm", &kernel_norm, py::arg("kernel"), py::arg("alpha") = 0.0);
    m.def("kernel_inner", &kernel_inner);
    m.def("kernel_trace", &kernel_trace);
    m.def("commutation_check", &commutation_check, py::arg("gamma"), py::arg("i"), py::arg("l"),
          py::arg("gap_a"), py::arg("gap_b"), py::arg("gap_c"), py::arg("plus_only") = false);
    m.def("random_separable_kernel",
          [](const GridSpec& g, int order, int rank, std::uint64_t seed, double decay) {
              std::mt19937_64 rng(seed);
              return random_separable_kernel(g, order, rank, rng, decay);
          },
          py::arg("grid"), py::arg("order"), py::arg("rank"), py::arg("seed") = 1,
          py::arg("decay") = 2.0);

    m.def("map_count", &map_count);
    m.def("count_echelon", &count_echelon, py::arg("r"), py::arg("n"),
          py::arg("cap") = std::uint64_t{10'000'000});
    m.def("echelon_bound", &echelon_bound);
    m.def("partition_count", &partition_count);
    m.def("equivalence_class_sizes", [](int r, int n) {
        std::vector<int> sizes;
        for (const auto& c : equivalence_classes(r, n))
            sizes.push_back(static_cast<int>(c.members.size()));
        return sizes;
    });
    m.def("to_echelon", [](int r, int n, const std::vector<int>& picks) {
        const EchelonResult res = to_echelon(CollapseMap{r, n, picks});
        return py::make_tuple(res.canonical.picks, res.col_time, res.moves);
    });

    m.def("crucialint",
          [](double alpha, int d, double P) { return crucialint(alpha, d, P).value; });
    m.def("c_alpha", [](double alpha, int d) {
        const CAlphaValue v = c_alpha(alpha, d);
        return py::make_tuple(v.value, v.error_bar);
    });
    m.def("potential_scaling_check",
          [](double beta, const std::vector<int>& Ns, double p, int d) {
              const ScalingCheck s = potential_scaling_check(beta, Ns, p, d);
              return py::make_tuple(s.slope, s.predicted);
          });

    m.def(
        "convergence_experiment",
        [](const std::string& json_text) {
            ExperimentConfig cfg = ExperimentConfig::from_json_text(json_text);
            cfg.experiment = "nbody-converge";
            cfg.validate();
            const ConvergenceResult res = convergence_experiment(cfg);
            py::list rows;
            for (const auto& r : res.rows)
                rows.append(py::make_tuple(r.N, r.M, r.trace_distance, r.energy_trace_diag));
            return py::make_tuple(rows, res.selected_M, res.b0, res.dt_used);
        },
        py::arg("config_json") = "{}");

    m.def("run_experiment", [](const std::string& json_text, const std::string& out_dir) {
        const ExperimentConfig cfg = ExperimentConfig::from_json_text(json_text);
        std::vector<std::string> files;
        for (const auto& f : run_experiment(cfg, out_dir)) files.push_back(f.string());
        return files;
    });
}
