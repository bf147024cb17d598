#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kqw/analysis.hpp"
#include "kqw/config.hpp"
#include "kqw/errors.hpp"
#include "kqw/leads.hpp"
#include "kqw/model.hpp"
#include "kqw/presets.hpp"
#include "kqw/runner.hpp"
#include "kqw/spectrum.hpp"
#include "kqw/transport.hpp"
#include "kqw/verify.hpp"

namespace py = pybind11;
using namespace kqw;

namespace {

WireConfig make_wire(int n, double j, cplx delta, double mu, Boundary boundary,
                     const std::vector<std::pair<int, double>>& defects) {
  WireConfig w{n, j, delta, mu, boundary, {}};
  for (const auto& [site, pot] : defects) w.defects.push_back({site, pot});
  w.validate();
  return w;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kitaev quantum wire: BdG spectra and two-lead transport";
  m.attr("__version__") = KQW_VERSION;

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  auto numerical_error = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<SymmetryError>(m, "SymmetryError", numerical_error.ptr());
  (void)config_error;

  py::enum_<Boundary>(m, "Boundary")
      .value("open", Boundary::open)
      .value("closed", Boundary::closed)
      .value("twisted", Boundary::twisted);
  py::enum_<SelfEnergyMode>(m, "SelfEnergyMode")
      .value("none", SelfEnergyMode::none)
      .value("exact", SelfEnergyMode::exact);
  py::enum_<ModeClass>(m, "ModeClass")
      .value("in_gap", ModeClass::in_gap)
      .value("bulk", ModeClass::bulk)
      .value("defect_byproduct", ModeClass::defect_byproduct);

  py::class_<Defect>(m, "Defect")
      .def(py::init<int, double>(), py::arg("site"), py::arg("potential"))
      .def_readwrite("site", &Defect::site)
      .def_readwrite("potential", &Defect::potential);

  py::class_<WireConfig>(m, "WireConfig")
      .def(py::init(&make_wire), py::arg("n_sites"), py::arg("hopping") = 1.0, py::arg("pairing") = cplx(0.0),
           py::arg("chem_potential") = 0.0, py::arg("boundary") = Boundary::open,
           py::arg("defects") = std::vector<std::pair<int, double>>{})
      .def_readwrite("n_sites", &WireConfig::n_sites)
      .def_readwrite("hopping", &WireConfig::hopping)
      .def_readwrite("pairing", &WireConfig::pairing)
      .def_readwrite("chem_potential", &WireConfig::chem_potential)
      .def_readwrite("boundary", &WireConfig::boundary)
      .def_readwrite("defects", &WireConfig::defects)
      .def("validate", &WireConfig::validate);

  py::class_<LeadConfig>(m, "LeadConfig")
      .def(py::init([](int site, double lambda, double omega_c, double mu, double temperature) {
             return LeadConfig{site, lambda, omega_c, mu, temperature};
           }),
           py::arg("contact_site"), py::arg("lambda_"), py::arg("omega_c"), py::arg("chem_potential") = 0.0,
           py::arg("temperature") = 0.0)
      .def_readwrite("contact_site", &LeadConfig::contact_site)
      .def_readwrite("lambda_", &LeadConfig::lambda)
      .def_readwrite("omega_c", &LeadConfig::omega_c)
      .def_readwrite("chem_potential", &LeadConfig::chem_potential)
      .def_readwrite("temperature", &LeadConfig::temperature);

  m.def("build_bdg", [](const WireConfig& w) { return build_bdg(w).entries(); }, py::arg("config"),
        "Dense 2N x 2N BdG matrix.");
  m.def("bulk_gap", &bulk_gap, py::arg("hopping"), py::arg("pairing"), py::arg("chem_potential"));
  m.def("particle_hole_image", &particle_hole_image, py::arg("matrix"));
  m.def("conjugate_swap", &conjugate_swap, py::arg("vector"));

  py::class_<EigenMode>(m, "EigenMode")
      .def_readonly("energy", &EigenMode::energy)
      .def_readonly("electron_amp", &EigenMode::electron_amp)
      .def_readonly("hole_amp", &EigenMode::hole_amp)
      .def_readonly("mode_class", &EigenMode::mode_class)
      .def("stacked", &EigenMode::stacked);
  py::class_<ModePair>(m, "ModePair")
      .def_readonly("positive", &ModePair::positive)
      .def_readonly("negative", &ModePair::negative)
      .def_property_readonly("energy", &ModePair::energy)
      .def_property_readonly("mode_class", &ModePair::mode_class);

  m.def("diagonalize", [](const WireConfig& w) { return diagonalize(build_bdg(w)); }, py::arg("config"));
  m.def(
      "solve_spectrum",
      [](const WireConfig& w, double gap_fraction, double byproduct_fraction) {
        return solve_spectrum(w, ClassifyOptions{gap_fraction, byproduct_fraction});
      },
      py::arg("config"), py::arg("gap_fraction") = 0.9, py::arg("byproduct_fraction") = 0.5);
  m.def(
      "majorana_rep",
      [](const EigenMode& mode) {
        const MajoranaPair p = majorana_rep(mode);
        return py::make_tuple(p.g, p.h);
      },
      py::arg("mode"));

  m.def("coupling_spectrum", &coupling_spectrum, py::arg("omega"), py::arg("lead"));
  m.def("damping", &damping, py::arg("omega"), py::arg("lead"), py::arg("mode") = SelfEnergyMode::none);

  m.def(
      "propagator",
      [](const WireConfig& w, const std::vector<LeadConfig>& leads, double omega, SelfEnergyMode mode) {
        return propagator(build_bdg(w), leads, omega, {mode}).matrix;
      },
      py::arg("config"), py::arg("leads"), py::arg("omega"), py::arg("self_energy") = SelfEnergyMode::none);

  m.def(
      "differential_conductance",
      [](const WireConfig& w, const std::vector<LeadConfig>& leads, double bias, SelfEnergyMode mode) {
        const ConductancePoint p = differential_conductance(w, leads, bias, {mode});
        return py::make_tuple(p.total, p.breakdown);
      },
      py::arg("config"), py::arg("leads"), py::arg("bias"), py::arg("self_energy") = SelfEnergyMode::none,
      "Returns (total, (direct, crossed, local_andreev)) in units of e^2/h.");

  m.def(
      "steady_current",
      [](const WireConfig& w, const std::vector<LeadConfig>& leads, double rel_tol, SelfEnergyMode mode) {
        QuadratureSpec q;
        q.rel_tol = rel_tol;
        const TransportResult r = steady_current(w, leads, q, {mode});
        return py::make_tuple(r.current, r.breakdown, r.error_estimate);
      },
      py::arg("config"), py::arg("leads"), py::arg("rel_tol") = 1e-8, py::arg("self_energy") = SelfEnergyMode::none,
      "Returns (current, (direct, crossed, local_andreev), error_estimate) in units of e*energy/h.");

  m.def(
      "conductance_sweep",
      [](const WireConfig& w, const std::vector<LeadConfig>& leads, double v_min, double v_max, int points,
         SelfEnergyMode mode, int threads) {
        SweepOptions opts;
        opts.propagator.self_energy = mode;
        opts.threads = threads;
        const ConductanceCurve c = conductance_sweep(w, leads, v_min, v_max, points, opts);
        Eigen::MatrixXd table(static_cast<Eigen::Index>(c.points.size()), 5);
        for (std::size_t i = 0; i < c.points.size(); ++i) {
          const auto& p = c.points[i];
          table.row(static_cast<Eigen::Index>(i)) << p.bias, p.total, p.breakdown[0], p.breakdown[1], p.breakdown[2];
        }
        py::list peaks;
        for (const auto& p : c.peaks) {
          py::dict d;
          d["location"] = p.location;
          d["height"] = p.height;
          d["fwhm"] = p.fwhm;
          d["resolved"] = p.resolved;
          d["in_gap"] = p.in_gap;
          peaks.append(d);
        }
        return py::make_tuple(table, peaks);
      },
      py::arg("config"), py::arg("leads"), py::arg("v_min"), py::arg("v_max"), py::arg("points"),
      py::arg("self_energy") = SelfEnergyMode::none, py::arg("threads") = 1,
      "Returns (table with columns bias,total,direct,crossed,local_andreev; list of peak dicts).");

  m.def(
      "landauer_oracle",
      [](const WireConfig& w, const std::vector<LeadConfig>& leads, double bias, SelfEnergyMode mode) {
        return landauer_oracle(w, leads, bias, mode);
      },
      py::arg("config"), py::arg("leads"), py::arg("bias"), py::arg("self_energy") = SelfEnergyMode::none);
  m.def(
      "steady_limit",
      [](const std::vector<std::tuple<cplx, cplx, int>>& terms) {
        PoleSum f;
        for (const auto& [r, p, order] : terms) f.add({r, p, order});
        return steady_limit(f);
      },
      py::arg("terms"), "terms: list of (residue, pole, order).");

  m.def("preset_names", &preset_names);
  m.def("preset_text", &preset_text, py::arg("name"));
  m.def("canonical_config", [](const std::string& text) { return to_config_text(parse_config(text)); },
        py::arg("text"));
  m.def(
      "run_config",
      [](const std::string& text, const std::string& out) {
        RunConfig cfg = parse_config(text);
        if (!out.empty()) cfg.output_dir = out;
        return run(cfg).files;
      },
      py::arg("text"), py::arg("output_dir") = "");
  m.def(
      "run_preset",
      [](const std::string& name, const std::string& out, int threads) {
        return run_preset(name, [&](RunConfig& c) {
                 if (!out.empty()) c.output_dir = out;
                 c.threads = threads;
               })
            .files;
      },
      py::arg("name"), py::arg("output_dir") = "", py::arg("threads") = 1);
  m.def("verify", [] {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const auto& r : run_verification()) out.emplace_back(r.name, r.passed, r.detail);
    return out;
  });
}
