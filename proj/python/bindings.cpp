#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rca/abduction.hpp"
#include "rca/serialize.hpp"

namespace py = pybind11;
using namespace rca;

namespace {

py::object to_python(const json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

json from_python(const py::handle& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

std::vector<session::Observation> observations_from(const py::iterable& items) {
  std::vector<session::Observation> out;
  for (const auto& item : items) {
    if (py::isinstance<py::tuple>(item)) {
      auto t = item.cast<std::pair<std::string, std::string>>();
      out.push_back({t.first, session::parse_status(t.second), session::Source::manual, 0});
    } else {
      out.push_back(session::observation_from_json(from_python(item)));
    }
  }
  return out;
}

abduction::AbductionConfig config_from(std::optional<double> reverse_weight, std::optional<double> mutex_weight) {
  abduction::AbductionConfig c;
  c.reverse_implication_weight = reverse_weight;
  c.mutual_exclusivity_weight = mutex_weight;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Abductive root cause analysis over infrastructure models";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<model::ParseError> parse_error(m, "ParseError", error.ptr());
  static py::exception<session::ObservationConflict> conflict(m, "ObservationConflict", error.ptr());
  static py::exception<session::Contradiction> contradiction(m, "Contradiction", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const model::ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const session::ObservationConflict& e) {
      py::set_error(conflict, e.what());
    } catch (const session::Contradiction& e) {
      py::set_error(contradiction, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<model::InfrastructureModel>(m, "Model")
      .def_readonly("components", &model::InfrastructureModel::components)
      .def_readonly("risks", &model::InfrastructureModel::risks)
      .def("validate", [](const model::InfrastructureModel& self) {
        return to_python(model::validation_to_json(model::validate_model(self)));
      })
      .def("to_dict", [](const model::InfrastructureModel& self) { return to_python(model::model_to_json(self)); })
      .def("graph", [](const model::InfrastructureModel& self) { return to_python(model::graph_to_json(self)); })
      .def("to_dsl", &model::to_dsl)
      .def_static("from_dict", [](const py::dict& doc) { return model::model_from_json(from_python(doc)); });

  m.def("parse_model", [](const std::string& text) { return model::parse_model(text); }, py::arg("text"),
        "Parse model DSL text.");

  py::class_<session::DiagnosisSession>(m, "Session")
      .def(py::init([](const model::InfrastructureModel& model, std::optional<double> reverse_weight,
                       std::optional<double> mutex_weight) {
             return session::DiagnosisSession(model, config_from(reverse_weight, mutex_weight));
           }),
           py::arg("model"), py::kw_only(), py::arg("reverse_weight") = py::none(),
           py::arg("mutex_weight") = py::none())
      .def(
          "observe",
          [](session::DiagnosisSession& self, const py::iterable& items) {
            self.add_observations(observations_from(items));
          },
          py::arg("observations"),
          "Append (component, 'available'|'unavailable') pairs or observation dicts.")
      .def(
          "diagnose",
          [](session::DiagnosisSession& self, std::size_t k) {
            session::DiagnoseOptions options;
            options.k = k;
            return to_python(session::to_json(self.diagnose(options)));
          },
          py::arg("k") = 1)
      .def("verify", [](const session::DiagnosisSession& self) {
        auto net = self.network();
        auto solved = mln::map_exact(net);
        auto oracle = mln::brute_force_map(net);
        return solved.score == oracle.score && solved.world == oracle.world;
      }, "Compare the solver against exhaustive enumeration.")
      .def("reset", &session::DiagnosisSession::reset)
      .def_property_readonly("log",
                             [](const session::DiagnosisSession& self) {
                               json out = json::array();
                               for (const auto& o : self.log()) out.push_back(session::to_json(o));
                               return to_python(out);
                             })
      .def("dump", [](const session::DiagnosisSession& self) {
        std::ostringstream os;
        mln::dump_network(os, self.network());
        return os.str();
      });

  m.def(
      "pc_mutex_clause_count",
      [](std::size_t n) {
        std::vector<logic::AtomId> heads(n);
        for (std::size_t i = 0; i < n; ++i) heads[i] = static_cast<logic::AtomId>(i);
        return abduction::pc_mutex_clauses(heads, -1.0).size();
      },
      py::arg("n"));
}
