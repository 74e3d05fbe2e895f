// Python view of the engine: windows, runs, charts, the differential table and
// the property checks.  Engine errors map to ValueError or RuntimeError.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "algnov/artifacts.hpp"
#include "algnov/charts.hpp"
#include "algnov/config.hpp"

namespace py = pybind11;
using namespace algnov;

namespace {

unsigned page_arg(const py::object& page)
{
    if (py::isinstance<py::str>(page)) {
        if (page.cast<std::string>() == "inf")
            return kInfinitePage;
        throw InvalidArgument("page must be an integer >= 2 or 'inf'");
    }
    const int n = page.cast<int>();
    if (n < 2)
        throw InvalidArgument("page must be an integer >= 2 or 'inf'");
    return static_cast<unsigned>(n - 1);  // Adams page E_n
}

py::dict row_dict(const RowReport& r)
{
    py::dict d;
    d["label"] = r.row.label;
    d["source"] = py::make_tuple(r.row.source.stem, r.row.source.filtration);
    d["target"] = py::make_tuple(r.row.target.stem, r.row.target.filtration);
    d["length"] = r.row.length;
    d["status"] = to_string(r.status);
    d["rank"] = r.rank;
    d["detail"] = r.detail;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Algebraic Novikov spectral sequence engine";
    m.attr("ENGINE_VERSION") = kEngineVersion;

    // translators run newest first, so the base class goes in first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<IntegrityError>(m, "IntegrityError", PyExc_ValueError);
    py::register_exception<WindowTooLarge>(m, "WindowTooLarge", PyExc_RuntimeError);
    py::register_exception<PrecisionExhausted>(m, "PrecisionExhausted", PyExc_RuntimeError);

    m.def("regrade", [](unsigned s, unsigned i, unsigned t) {
        const ChartPosition p = regrade(s, i, t);
        return py::make_tuple(p.stem, p.filtration, p.weight);
    }, py::arg("s"), py::arg("i"), py::arg("t"), "(stem, filtration, weight) of tri-degree (s, i, t)");
    m.def("unregrade", [](int stem, unsigned filtration, unsigned weight) {
        return unregrade({stem, filtration, weight});
    });
    m.def("chow_novikov", &chow_novikov, py::arg("s"), py::arg("w"));
    m.def("differential_length", &differential_length, py::arg("r"));

    m.def("right_unit", [](unsigned p, unsigned t_max, unsigned n, unsigned K) {
        HopfStructureMaps maps(TruncationWindow::make(p, t_max, K));
        const unsigned N = maps.window().N;
        if (n < 1 || n > N)
            throw InvalidArgument("generator index outside the window");
        Exps e{};
        e[n - 1] = 1;
        py::list out;
        for (const auto& term : maps.right_unit(e))
            out.append(py::make_tuple(term.coeff, std::vector<int>(term.v.begin(), term.v.begin() + N),
                                      std::vector<int>(term.t.begin(), term.t.begin() + N)));
        return out;
    }, py::arg("p"), py::arg("t_max"), py::arg("n"), py::arg("precision") = 8,
       "terms (coeff, v exponents, t exponents) of the right unit on v_n");
    m.def("check_axioms", [](unsigned p, unsigned t_max, unsigned K) {
        const AxiomReport rep = check_axioms(HopfStructureMaps(TruncationWindow::make(p, t_max, K)));
        py::dict out;
        for (const auto& c : rep.checks)
            out[py::str(c.name)] = c.pass;
        return out;
    }, py::arg("p"), py::arg("t_max"), py::arg("precision") = 8);
    m.def("koszul_check", [](unsigned p, unsigned t_max, unsigned n_max, unsigned K) {
        const KoszulReport rep = koszul_check(p, t_max, n_max, K);
        py::dict out;
        out["d1_hits_generators"] = rep.d1_hits_generators;
        out["e2_in_weight_zero"] = rep.e2_in_weight_zero;
        out["tor_maps_vanish"] = rep.tor_maps_vanish;
        out["failures"] = rep.failures;
        return out;
    }, py::arg("p"), py::arg("t_max"), py::arg("n_max"), py::arg("precision") = 8);

    m.def("classical_chart", [](unsigned stem_max, unsigned s_max, const std::string& fmt) {
        auto A = std::make_shared<const DualAlgebra>(HopfPresentation::dual_steenrod(stem_max + s_max));
        const ChartDoc chart = build_classical_chart(MinimalResolution(A, s_max), stem_max);
        return fmt == "svg" ? emit_svg(chart) : fmt == "json" ? emit_json(chart) : emit_tsv(chart);
    }, py::arg("stem_max"), py::arg("s_max"), py::arg("format") = "tsv");

    m.def("verify_pages", [](const std::string& text) { return unseal_json(text); },
          "canonical text of a sealed pages document; raises IntegrityError when tampered");

    py::class_<RunConfig>(m, "Config")
        .def(py::init([](const std::string& suite) { return suite.empty() ? RunConfig{} : suite_config(suite); }),
             py::arg("suite") = "")
        .def_readwrite("prime", &RunConfig::prime)
        .def_readwrite("stem_max", &RunConfig::stem_max)
        .def_readwrite("s_max", &RunConfig::s_max)
        .def_readwrite("i_max", &RunConfig::i_max)
        .def_readwrite("r_max", &RunConfig::r_max)
        .def_readwrite("precision", &RunConfig::precision)
        .def_readwrite("threads", &RunConfig::threads)
        .def_readwrite("basis_cap", &RunConfig::basis_cap)
        .def("echo", &RunConfig::echo);

    py::class_<NovikovRun>(m, "Run")
        .def(py::init([](const RunConfig& cfg, bool force) {
                 py::gil_scoped_release release;
                 return std::make_unique<NovikovRun>(cfg.window(), cfg.threads, force ? 0 : cfg.basis_cap);
             }),
             py::arg("config"), py::arg("force") = false)
        .def("dimension", [](NovikovRun& run, unsigned s, unsigned i, unsigned t, const py::object& page) {
            const NovikovWindow& w = run.window();
            if (!w.contains(s, i, t) || t % (2 * (w.p - 1)) != 0)
                throw InvalidArgument("tri-degree outside the window");
            return run.sequence(t).dimension(s, i, page_arg(page));
        }, py::arg("s"), py::arg("i"), py::arg("t"), py::arg("page") = 2,
           "dimension of the Adams-indexed page E_page at (s, i, t)")
        .def("verify_table", [](NovikovRun& run) {
            py::list out;
            for (const auto& r : verify_table(run))
                out.append(row_dict(r));
            return out;
        })
        .def("chart", [](NovikovRun& run, const py::object& page, const std::string& fmt) {
            const auto registry = NameRegistry::cofiber_tau();
            const ChartDoc chart = build_chart(run, page_arg(page), &registry);
            return fmt == "svg" ? emit_svg(chart) : fmt == "json" ? emit_json(chart) : emit_tsv(chart);
        }, py::arg("page") = 2, py::arg("format") = "tsv")
        .def("pages_json", [](NovikovRun& run, const RunConfig& cfg) { return pages_json(run, cfg.echo()); });
}
