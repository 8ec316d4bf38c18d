#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrwp/core.hpp"
#include "mrwp/experiments.hpp"
#include "mrwp/flooding.hpp"
#include "mrwp/stationary.hpp"
#include "mrwp/zones.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace mrwp;

namespace {

SourceRule parse_rule(const std::string& s)
{
    if (s == "random") return SourceRule::Random;
    if (s == "cz") return SourceRule::InCentralZone;
    if (s == "suburb") return SourceRule::InSuburb;
    throw py::value_error("source must be 'random', 'cz' or 'suburb'");
}

InitMode parse_init(const std::string& s, std::optional<std::int64_t> warmup_steps)
{
    if (s == "warmup") return InitMode::warmup(warmup_steps);
    if (s == "approx-stationary") return InitMode::approx_stationary();
    throw py::value_error("init must be 'warmup' or 'approx-stationary'");
}

py::dict record_dict(const RunRecord& r)
{
    py::dict d;
    d["source"] = r.source;
    d["source_rule"] = std::string(to_string(r.source_rule));
    d["status"] = r.timed_out ? "TIMEOUT" : "COMPLETE";
    d["flooding_time"] = r.flooding_time;
    d["cz_spread_time"] = r.cz_spread_time;
    d["theoretical_bound"] = r.theoretical_bound;
    d["max_steps"] = r.max_steps;
    d["steps_run"] = r.steps_run;
    d["frontier_bound"] = r.frontier_bound;
    d["frontier_violations"] = r.violations.frontier;
    d["stability_violations"] = r.violations.stability;
    d["stability_checks"] = r.violations.stability_checks;
    py::list informed;
    for (const ProgressRow& row : r.progress) {
        informed.append(row.informed_count);
    }
    d["informed_counts"] = informed;
    return d;
}

} // namespace

PYBIND11_MODULE(_mrwp, m)
{
    m.doc() = "Flooding over Manhattan random way-point networks";

    py::class_<WorldParams>(m, "WorldParams")
        .def(py::init([](std::int64_t n, double L, double R, double v, std::uint64_t seed, double c1, double c2,
                         double eta) {
                 WorldParams p{n, L, R, v, seed, c1, c2, eta};
                 p.validate();
                 return p;
             }),
             py::arg("n"), py::arg("L"), py::arg("R"), py::arg("v"), py::arg("seed") = 1, py::arg("c1") = 200.0,
             py::arg("c2") = kDefaultC2, py::arg("eta") = 0.02)
        .def_readwrite("n", &WorldParams::n)
        .def_readwrite("L", &WorldParams::L)
        .def_readwrite("R", &WorldParams::R)
        .def_readwrite("v", &WorldParams::v)
        .def_readwrite("seed", &WorldParams::seed)
        .def_readwrite("c1", &WorldParams::c1)
        .def_readwrite("c2", &WorldParams::c2)
        .def_readwrite("eta", &WorldParams::eta)
        .def("assumptions_hold", &WorldParams::assumptions_hold)
        .def("__repr__", [](const WorldParams& p) {
            return "WorldParams(n=" + std::to_string(p.n) + ", L=" + std::to_string(p.L) + ", R=" +
                   std::to_string(p.R) + ", v=" + std::to_string(p.v) + ", seed=" + std::to_string(p.seed) + ")";
        });

    m.attr("DEFAULT_C2") = kDefaultC2;
    m.attr("RNG_ALGORITHM") = std::string(RngStream::algorithm_id);

    m.def("desk_params", &desk_params, py::arg("n"), py::arg("c1") = 2.0, py::arg("multiplier") = 1.0,
          py::arg("c2") = kDefaultC2, py::arg("seed") = 1);
    m.def("radius_threshold", &radius_threshold, py::arg("n"), py::arg("L"), py::arg("c1"));

    m.def("spatial_density", [](double x, double y, double L) { return spatial_density({x, y}, L); }, py::arg("x"),
          py::arg("y"), py::arg("L"));
    m.def("cell_probability", [](double x0, double y0, double side, double L) {
        return cell_probability({x0, y0}, side, L);
    }, py::arg("x0"), py::arg("y0"), py::arg("side"), py::arg("L"));
    m.def("destination_law", [](double x, double y, double L) {
        const DestinationLaw law = destination_law({x, y}, L);
        py::dict d;
        d["quadrant_density"] = py::dict("SW"_a = law.quadrant_density[0], "NE"_a = law.quadrant_density[1],
                                         "NW"_a = law.quadrant_density[2], "SE"_a = law.quadrant_density[3]);
        d["cross"] = py::dict("south"_a = law.cross.south, "north"_a = law.cross.north, "west"_a = law.cross.west,
                              "east"_a = law.cross.east);
        d["total_mass"] = law.total_mass();
        return d;
    }, py::arg("x"), py::arg("y"), py::arg("L"));

    m.def("zone_map", [](const WorldParams& p) {
        const ZoneMap z = build_zone_map(p);
        py::list labels;
        for (int r = 0; r < z.m(); ++r) {
            py::list row;
            for (int c = 0; c < z.m(); ++c) {
                row.append(z.is_central(z.id(r, c)) ? "C" : "S");
            }
            labels.append(row);
        }
        const RowColumnCounts rc = cz_row_column_counts(z);
        py::dict d;
        d["m"] = z.m();
        d["ell"] = z.ell();
        d["S"] = z.S();
        d["cz_size"] = z.cz_size();
        d["suburb_size"] = z.suburb_size();
        d["cz_rows"] = rc.rows;
        d["cz_columns"] = rc.columns;
        d["labels"] = labels;
        d["suburb_diameter_violations"] = check_suburb_diameter(z).size();
        return d;
    }, py::arg("params"), "Cell labels with row 0 at the bottom.");

    m.def("theoretical_bound", [](const WorldParams& p, double a, double b) {
        return theoretical_bound(p, build_zone_map(p), {a, b});
    }, py::arg("params"), py::arg("a") = 18.0, py::arg("b") = 600.0);

    m.def("run_flood", [](const WorldParams& p, const std::string& source, const std::string& init,
                          std::optional<std::int64_t> warmup_steps, std::optional<std::int64_t> max_steps,
                          unsigned threads) {
        FloodOptions opts;
        opts.max_steps = max_steps;
        opts.threads = threads;
        const SourceRule rule = parse_rule(source);
        const InitMode mode = parse_init(init, warmup_steps);
        RunRecord rec;
        {
            py::gil_scoped_release release;
            rec = run_flood(p, mode, rule, opts);
        }
        return record_dict(rec);
    }, py::arg("params"), py::arg("source") = "random", py::arg("init") = "warmup", py::arg("warmup_steps") = py::none(),
       py::arg("max_steps") = py::none(), py::arg("threads") = 1);

    m.def("event_b_probability", &event_b_probability, py::arg("n"), py::arg("L"), py::arg("d"));
    m.def("best_kappa", &best_kappa, py::arg("n"));

    py::register_exception_translator([](std::exception_ptr ptr) {
        try {
            if (ptr) std::rethrow_exception(ptr);
        } catch (const std::invalid_argument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });
}
