#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "costar/cli.hpp"
#include "costar/ergm.hpp"
#include "costar/error.hpp"
#include "costar/ingest.hpp"
#include "costar/null_model.hpp"
#include "costar/report.hpp"

namespace py = pybind11;
using namespace costar;

namespace {

RegionSet to_region_set(const std::vector<std::string>& labels) {
    RegionSet set;
    for (const auto& l : labels) {
        auto r = parse_region(l);
        if (!r) throw ConfigError("unknown region '" + l + "'");
        set.insert(*r);
    }
    return set;
}

Region to_region(const std::string& label) {
    auto r = parse_region(label);
    if (!r) throw ConfigError("unknown region '" + label + "'");
    return *r;
}

py::dict fit_dict(const ergm::ErgmFit& f) {
    py::dict d;
    d["terms"] = f.terms;
    d["theta"] = f.theta;
    d["se"] = f.se;
    d["log_likelihood"] = f.log_likelihood;
    d["null_deviance"] = f.null_deviance;
    d["residual_deviance"] = f.residual_deviance;
    d["aic"] = f.aic;
    d["bic"] = f.bic;
    d["k"] = f.k;
    d["n_dyads"] = f.n_dyads;
    d["converged"] = f.converged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_costar, m) {
    m.doc() = "Co-starring network analysis";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    py::class_<PeriodSpec>(m, "Period")
        .def(py::init<std::string, int, int>(), py::arg("label"), py::arg("start"), py::arg("end"))
        .def_readonly("label", &PeriodSpec::label)
        .def_readonly("start", &PeriodSpec::start_year)
        .def_readonly("end", &PeriodSpec::end_year)
        .def("__repr__", [](const PeriodSpec& p) { return "Period('" + p.label + "')"; });

    m.def("make_schedule", &make_schedule, py::arg("start"), py::arg("end"), py::arg("window"));

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("star_count", [](const Dataset& d) { return d.stars().size(); })
        .def_property_readonly("work_count", [](const Dataset& d) { return d.works().size(); })
        .def_property_readonly("cast_count", [](const Dataset& d) { return d.cast().size(); })
        .def_property_readonly("duplicate_cast_rows", &Dataset::duplicate_cast_rows);

    m.def("load_dataset",
          [](const std::filesystem::path& stars, const std::filesystem::path& works,
             const std::filesystem::path& cast) { return load_dataset(stars, works, cast); },
          py::arg("stars"), py::arg("works"), py::arg("cast"));

    py::class_<CollabNetwork>(m, "Network")
        .def_property_readonly("node_count", &CollabNetwork::node_count)
        .def_property_readonly("edge_count", &CollabNetwork::edge_count)
        .def_property_readonly("keys", [](const CollabNetwork& g) {
            return std::vector<std::string>(g.keys().begin(), g.keys().end());
        })
        .def_property_readonly("regions", [](const CollabNetwork& g) {
            std::vector<std::string> out;
            for (const auto& n : g.nodes()) out.emplace_back(to_string(n.region));
            return out;
        })
        .def("edges", [](const CollabNetwork& g) {
            std::vector<std::tuple<std::uint32_t, std::uint32_t, int>> out;
            for (const auto& e : g.edges()) out.emplace_back(e.edge.u.value, e.edge.v.value, e.weight);
            return out;
        })
        .def("degree_sequence", [](const CollabNetwork& g) { return degree_sequence(g); })
        .def("average_degree", [](const CollabNetwork& g) { return average_degree(g); })
        .def("average_clustering", [](const CollabNetwork& g) { return average_clustering(g); })
        .def("density", [](const CollabNetwork& g) { return density(g); });

    m.def("project",
          [](const Dataset& ds, const PeriodSpec& p, const std::vector<std::string>& regions) {
              return project(ds, p, to_region_set(regions));
          },
          py::arg("dataset"), py::arg("period"), py::arg("regions"));

    m.def("cross_region_index",
          [](const CollabNetwork& g, const std::string& r1, const std::string& r2, std::size_t replicates,
             std::uint64_t seed, double swap_multiplier) {
              SwapConfig cfg;
              cfg.replicates = replicates;
              cfg.seed = seed;
              cfg.swap_multiplier = swap_multiplier;
              const auto r = cross_region_index(g, to_region(r1), to_region(r2), cfg);
              py::dict d;
              d["period"] = r.period;
              d["observed"] = r.observed;
              d["expected"] = r.expected;
              d["ratio"] = r.ratio;
              d["ci_low"] = r.ci_low;
              d["ci_high"] = r.ci_high;
              return d;
          },
          py::arg("network"), py::arg("first"), py::arg("second"), py::arg("replicates") = 100,
          py::arg("seed") = 0, py::arg("swap_multiplier") = 2.0);

    m.def("fit_ergm",
          [](const CollabNetwork& g, const std::optional<std::string>& terms_json) {
              const auto requests = terms_json
                                        ? ergm::parse_term_requests(nlohmann::json::parse(*terms_json))
                                        : ergm::default_term_requests();
              const auto terms = ergm::resolve_terms(g.nodes(), g.period(), requests);
              return fit_dict(ergm::fit(g, terms));
          },
          py::arg("network"), py::arg("terms_json") = py::none(),
          "Fits the dyad-independent model; terms_json is a JSON term list.");

    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::ostringstream out, err;
              int code;
              {
                  py::gil_scoped_release release;
                  code = cli::run(args, out, err);
              }
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Runs a costar command line; returns (exit_code, stdout, stderr).");
}
