#include "iolb/harness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace iolb;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Derivation derivation_for(const std::string& kernel, const std::string& convention) {
  if (convention != "proof" && convention != "table") throw std::invalid_argument("convention is proof or table");
  return derive(builtin_kernel(kernel), convention == "proof" ? Convention::proof : Convention::table);
}

py::object bounds(const std::string& kernel, std::optional<Binding> binding, const std::string& convention) {
  Derivation d = derivation_for(kernel, convention);
  const Binding* b = binding ? &*binding : nullptr;
  Json j;
  j["kernel"] = kernel;
  j["convention"] = convention;
  j["primary_statement"] = d.primary_bound().statement;
  j["reports"] = Json::array();
  for (const auto& r : d.reports) j["reports"].push_back(to_json(r));
  j["classical"] = Json::array();
  for (const auto& c : d.classical) j["classical"].push_back(to_json(c, b));
  j["hourglass"] = Json::array();
  for (const auto& h : d.hourglass) j["hourglass"].push_back(to_json(h, b));
  if (b) {
    auto h = best_hourglass(d, *b);
    auto c = best_classical(d, *b);
    j["best_hourglass"] = h.bound ? to_json(h.value) : Json(nullptr);
    j["best_classical"] = c.bound ? to_json(c.value) : Json(nullptr);
  }
  return to_py(j);
}

py::object detect_reports(const std::string& kernel) {
  Json j = Json::array();
  for (const auto& r : detect_all(builtin_kernel(kernel))) j.push_back(to_json(r));
  return to_py(j);
}

py::object catalog_entry(const std::string& kernel) {
  CatalogEntry c = catalog(kernel);
  Json j;
  j["kernel"] = c.kernel;
  j["old_bound"] = c.old_bound.normalized_string();
  j["new_bound"] = c.new_bound.normalized_string();
  j["old_leading"] = c.old_leading.normalized_string();
  j["new_leading"] = c.new_leading.normalized_string();
  j["upper"] = c.upper ? Json(c.upper->normalized_string()) : Json(nullptr);
  return to_py(j);
}

py::object run_simulation(const std::string& kernel, const Binding& binding, const std::string& schedule,
                          std::optional<std::int64_t> block, const std::string& policy) {
  Simulation s;
  {
    py::gil_scoped_release release;
    s = simulate(kernel, binding, parse_schedule_kind(schedule), block, parse_policy(policy));
  }
  return to_py(to_json(s));
}

std::string run_sweep(const std::string& kernel, const std::vector<std::int64_t>& M, const std::vector<std::string>& N,
                      const std::vector<std::string>& S, const std::string& policy, unsigned threads) {
  py::gil_scoped_release release;
  return sweep_csv(sweep(kernel, {M, N, S}, parse_policy(policy), threads));
}

py::object run_sampling(const std::string& kernel, const Binding& binding, std::size_t K, std::size_t samples,
                        std::uint64_t seed) {
  SamplingReport r;
  {
    py::gil_scoped_release release;
    r = verify_sampling(builtin_kernel(kernel), binding, K, samples, seed);
  }
  return to_py(to_json(r));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hourglass-pattern I/O lower bounds, pebble simulation and verification";

  py::register_exception<KernelError>(m, "KernelError", PyExc_ValueError);
  py::register_exception<CdagError>(m, "CdagError", PyExc_ValueError);
  py::register_exception<ScheduleError>(m, "ScheduleError", PyExc_ValueError);
  py::register_exception<PebbleError>(m, "PebbleError", PyExc_ValueError);

  m.def("kernel_names", &builtin_kernel_names);
  m.def("catalog_names", &catalog_names);
  m.def("kernel_source", [](const std::string& k) { return builtin_kernel(k).to_string(); }, py::arg("kernel"));
  m.def("detect", &detect_reports, py::arg("kernel"));
  m.def("bounds", &bounds, py::arg("kernel"), py::arg("binding") = py::none(), py::arg("convention") = "proof");
  m.def("catalog", &catalog_entry, py::arg("kernel"));
  m.def("default_block", &default_block, py::arg("binding"));
  m.def("simulate", &run_simulation, py::arg("kernel"), py::arg("binding"), py::arg("schedule") = "reference",
        py::arg("block") = py::none(), py::arg("policy") = "belady");
  m.def("sweep_csv", &run_sweep, py::arg("kernel"), py::arg("M"), py::arg("N"), py::arg("S"),
        py::arg("policy") = "belady", py::arg("threads") = 0);
  m.def("verify_sampling", &run_sampling, py::arg("kernel"), py::arg("binding"), py::arg("K"),
        py::arg("samples") = 2000, py::arg("seed") = 0);
  m.def("evaluate_grid_expr", &evaluate_grid_expr, py::arg("expr"), py::arg("known") = Binding{});
}
