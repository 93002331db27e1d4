// Copyright 2026 The ssm-dyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Matrices cross the boundary as complex128 numpy arrays;
// Operator and SuperOperator wrappers stay on the C++ side.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ssmdyn/evolution.hpp"
#include "ssmdyn/experiments.hpp"
#include "ssmdyn/liouville.hpp"
#include "ssmdyn/model_file.hpp"
#include "ssmdyn/spin_ops.hpp"
#include "ssmdyn/ssm_projection.hpp"
#include "ssmdyn/sweep_io.hpp"

namespace py = pybind11;
using namespace ssmdyn;

namespace {

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  throw ModelError("axis must be 'x', 'y' or 'z', got '" + s + "'");
}

PerturbationScaling parse_scaling(const std::string& s) {
  if (s == "inverse") return PerturbationScaling::inverse;
  if (s == "inverse_sqrt") return PerturbationScaling::inverse_sqrt;
  throw ModelError("scaling must be 'inverse' or 'inverse_sqrt', got '" + s + "'");
}

py::dict record_dict(const SweepRecord& r) {
  py::dict d;
  d["T"] = r.t_scale;
  d["distance"] = r.distance;
  d["leakage"] = r.leakage;
  d["projector_drift"] = r.projector_drift ? py::cast(*r.projector_drift) : py::none();
  d["wall_time"] = r.wall_time;
  d["error"] = r.error ? py::cast(*r.error) : py::none();
  return d;
}

py::list records_list(const std::vector<SweepRecord>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(record_dict(r));
  return out;
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["points_used"] = f.points_used;
  d["residual"] = f.residual;
  d["warnings"] = f.warnings;
  return d;
}

SweepOptions make_options(const std::string& scaling, bool drift, unsigned threads) {
  SweepOptions o;
  o.scaling = parse_scaling(scaling);
  o.projector_drift = drift;
  o.threads = threads;
  o.record_timing = false;
  return o;
}

ScenarioConfig make_config(const std::string& scenario, const std::map<std::string, std::string>& params,
                           bool full_scale) {
  std::string text;
  for (const auto& [k, v] : params) text += k + " = " + v + "\n";
  ScenarioConfig cfg = ScenarioConfig::from_keyvalue(parse_scenario(scenario),
                                                     KeyValueFile::parse(text, "<python>"));
  cfg.full_scale = full_scale;
  cfg.record_timing = false;
  if (auto m = params.find("model"); m != params.end()) cfg.model_file = m->second;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Steady-state manifold projections and effective dynamics";
  m.attr("__version__") = version();

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // Linear algebra.
  m.def("kron", &kron, py::arg("a"), py::arg("b"));
  m.def("vec", &vec, py::arg("x"));
  m.def("unvec", &unvec, py::arg("v"), py::arg("dim"));
  m.def("expm", &expm, py::arg("m"));
  m.def("svd_max", &svd_max, py::arg("m"));
  m.def("pauli", [](const std::string& a) { return pauli(parse_axis(a)); }, py::arg("axis"));

  // Spin operators.
  m.def("collective_spin",
        [](int n, const std::string& a) { return collective_spin(SpinRegister(n), parse_axis(a)).matrix(); },
        py::arg("n_sites"), py::arg("axis"));
  m.def("dfs_gate_hamiltonian",
        [](const std::string& a) { return dfs_gate_hamiltonian(SpinRegister(4), parse_axis(a)).matrix(); },
        py::arg("axis"));
  m.def("logical_basis_j0", []() { return logical_basis_j0(SpinRegister(4)).basis; });

  // Generators.
  m.def("hamiltonian_superop", [](const Matrix& h) { return hamiltonian_superop(Operator(h)).matrix(); },
        py::arg("h"));
  m.def(
      "lindblad_superop",
      [](const std::vector<std::pair<Matrix, double>>& terms, Index dim) {
        std::vector<LindbladTerm> t;
        for (const auto& [op, rate] : terms) t.push_back({Operator(op), rate});
        return lindblad_superop(t, dim).matrix();
      },
      py::arg("terms"), py::arg("dim"));
  m.def(
      "kraus_generator",
      [](const std::vector<std::pair<Matrix, double>>& terms) {
        std::vector<KrausTerm> t;
        for (const auto& [op, w] : terms) t.push_back({Operator(op), w});
        return kraus_generator(t).matrix();
      },
      py::arg("terms"));
  m.def("relaxation_time", [](const Matrix& l0) { return relaxation_time(SuperOperator(l0)); },
        py::arg("l0"));

  py::class_<LiouvillianModel>(m, "Model")
      .def_readonly("dim", &LiouvillianModel::dim)
      .def_readwrite("strength", &LiouvillianModel::strength)
      .def_readwrite("scale", &LiouvillianModel::scale)
      .def_property_readonly("perturbation",
                             [](const LiouvillianModel& mo) { return mo.perturbation.matrix(); })
      .def("assemble", [](const LiouvillianModel& mo) {
        const AssembledModel a = assemble(mo);
        return py::make_tuple(a.l0.matrix(), a.k_superop.matrix());
      });

  m.def("dfs4_model",
        [](const std::string& gate, double gx, double gy, double gz, double theta) {
          return dfs4_model(parse_axis(gate), gx, gy, gz, theta);
        },
        py::arg("gate") = "x", py::arg("gamma_x") = 1.0, py::arg("gamma_y") = 1.0,
        py::arg("gamma_z") = 1.0, py::arg("theta") = 1.0);
  m.def("ns3_model", &ns3_model, py::arg("phi_x") = 1.0, py::arg("phi_y") = 1.0,
        py::arg("phi_z") = 1.0, py::arg("theta") = 1.0);
  m.def("zeno_model", &zeno_model, py::arg("n_sites") = 3, py::arg("gamma") = 1.0);
  m.def("second_order_model", &second_order_model, py::arg("strength") = 1.0,
        py::arg("gamma") = 1.0);
  m.def("load_model", [](const std::filesystem::path& p) { return load_model(p); }, py::arg("path"));

  m.def(
      "spin_boson_model",
      [](int n_s, int n_b, double g) {
        const SpinBosonModel sb = spin_boson_model(n_s, n_b, g);
        py::dict d;
        d["h0"] = sb.h0.matrix();
        d["h1"] = sb.h1.matrix();
        d["dark_states"] = sb.dark_states;
        d["phi"] = sb.phi;
        d["analytic_projection"] = spin_boson_analytic_projection(sb).matrix();
        return d;
      },
      py::arg("n_s") = 3, py::arg("n_b") = 12, py::arg("coupling") = 0.045);

  // Projections.
  m.def(
      "kernel_projector",
      [](const Matrix& l0) {
        const SsmData s = kernel_projector(SuperOperator(l0));
        py::dict d;
        d["p0"] = s.p0.matrix();
        d["q0"] = s.q0.matrix();
        d["resolvent"] = s.resolvent.matrix();
        d["ssm_dim"] = s.ssm_dim;
        d["tau_r"] = s.tau_r ? py::cast(*s.tau_r) : py::none();
        d["gap"] = s.gap;
        return d;
      },
      py::arg("l0"));
  m.def(
      "effective_generator",
      [](const Matrix& l0, const Matrix& k) {
        return effective_generator(kernel_projector(SuperOperator(l0)), SuperOperator(k)).matrix();
      },
      py::arg("l0"), py::arg("k"));
  m.def(
      "commutant_projection_dfs4",
      [](const Matrix& x) {
        return commutant_projection(total_spin_blocks(SpinRegister(4)), Operator(x)).matrix();
      },
      py::arg("x"));
  m.def(
      "energy_pinching",
      [](const Matrix& h0, const Matrix& x) { return EnergyPinching(Operator(h0)).apply(Operator(x)).matrix(); },
      py::arg("h0"), py::arg("x"));

  // Sweeps.
  m.def("log_grid", &log_grid, py::arg("t_min"), py::arg("t_max"), py::arg("points"));
  m.def("default_grid", &default_grid);
  m.def(
      "run_sweep",
      [](const LiouvillianModel& mo, const std::vector<double>& grid, const std::string& scaling,
         bool drift, unsigned threads) {
        const SweepOptions o = make_options(scaling, drift, threads);
        std::vector<SweepRecord> r;
        {
          py::gil_scoped_release release;
          r = run_sweep(prepare_sweep(mo, o.scaling), grid, o);
        }
        return records_list(r);
      },
      py::arg("model"), py::arg("grid"), py::arg("scaling") = "inverse",
      py::arg("projector_drift") = false, py::arg("threads") = 0);
  m.def(
      "run_hamiltonian_sweep",
      [](const Matrix& h0, const Matrix& k, const std::vector<double>& grid, unsigned threads) {
        const SweepOptions o = make_options("inverse", false, threads);
        std::vector<SweepRecord> r;
        {
          py::gil_scoped_release release;
          r = run_hamiltonian_sweep(Operator(h0), Operator(k), grid, o);
        }
        return records_list(r);
      },
      py::arg("h0"), py::arg("k"), py::arg("grid"), py::arg("threads") = 0);
  m.def(
      "loglog_fit",
      [](const std::vector<double>& t, const std::vector<double>& v, int n) {
        return fit_dict(loglog_fit(t, v, n));
      },
      py::arg("t_scale"), py::arg("values"), py::arg("n_points") = 4);
  m.def(
      "read_sweep_csv",
      [](const std::filesystem::path& p) { return records_list(load_sweep_csv(p)); }, py::arg("path"));

  // Scenarios. Reports come back as JSON text; the package wrapper decodes them.
  m.def("scenario_names", &scenario_names);
  m.def(
      "validate_scenario_json",
      [](const std::string& s, const std::map<std::string, std::string>& params, bool full_scale) {
        return report_json(validate_scenario(make_config(s, params, full_scale)));
      },
      py::arg("scenario"), py::arg("params") = std::map<std::string, std::string>{},
      py::arg("full_scale") = false);
  m.def(
      "run_scenario_json",
      [](const std::string& s, const std::map<std::string, std::string>& params, bool full_scale,
         std::optional<std::filesystem::path> out_dir) {
        const ScenarioConfig cfg = make_config(s, params, full_scale);
        ScenarioReport r;
        {
          py::gil_scoped_release release;
          r = run_scenario(cfg);
        }
        if (out_dir) {
          ScenarioConfig c = cfg;
          c.out_dir = *out_dir;
          write_outputs(r, c);
        }
        return report_json(r);
      },
      py::arg("scenario"), py::arg("params") = std::map<std::string, std::string>{},
      py::arg("full_scale") = false, py::arg("out_dir") = std::nullopt);
}
