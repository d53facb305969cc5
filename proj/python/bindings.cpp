// Python module: load a domain, drive an agent, read its state and dumps.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xapagy/agent.hpp"

namespace py = pybind11;
using namespace xapagy;

namespace {

Config config_from(const py::dict& values) {
  Config config;
  for (auto [k, v] : values) {
    std::string key = py::str(k);
    if (py::isinstance<py::str>(v)) {
      config.set(key, v.cast<std::string>());
    } else {
      config.set(key, v.cast<double>());
    }
  }
  return config;
}

std::optional<Purpose> purpose_named(const std::string& name) {
  for (Purpose p : kPurposes)
    if (to_string(p) == name) return p;
  throw ConfigError("unknown purpose " + name);
}

py::dict result_dict(const Agent& a, const Agent::StatementResult& r) {
  py::dict d;
  py::list vis, internal;
  for (ViId v : r.vis) vis.append(a.render(v));
  for (ViId v : r.internal) internal.append(a.render(v));
  d["vis"] = vis;
  d["internal"] = internal;
  if (r.surprise) {
    d["expectedness"] = r.surprise->expectedness;
    d["surprise"] = r.surprise->surprise;
  }
  return d;
}

std::vector<std::string> rendered(const Agent& a, const std::vector<ViId>& vis) {
  std::vector<std::string> out;
  for (ViId v : vis) out.push_back(a.render(v));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Narrative reasoning agent";

  auto error = py::register_exception<Error>(m, "XapagyError");
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<StoryError>(m, "StoryError", error);

  py::class_<Domain>(m, "Domain")
      .def_static("load", [](const std::string& path) { return Domain::load(path); })
      .def_static("parse", &Domain::parse);

  py::class_<Agent>(m, "Agent")
      .def(py::init([](const Domain& domain, const py::dict& config) {
             return std::make_unique<Agent>(domain, config_from(config));
           }),
           py::arg("domain"), py::arg("config") = py::dict())
      .def_static("load", [](const std::string& path) { return std::make_unique<Agent>(Agent::load(path)); })
      .def("execute", [](Agent& a, const std::string& s) { return result_dict(a, a.execute(s)); })
      .def("run_story", &Agent::run_story)
      .def("run_file", [](Agent& a, const std::string& path) { a.run_file(path); })
      .def("idle", [](Agent& a, int ticks) { return rendered(a, a.idle(ticks)); }, py::arg("ticks") = 1)
      .def("recall", [](Agent& a, int steps) { return rendered(a, a.recall(steps)); }, py::arg("steps") = 1)
      .def("set_mood", &Agent::set_mood)
      .def("set_mood_value", &Agent::set_mood_value)
      .def_property_readonly("mood", [](const Agent& a) { return a.mood().preset; })
      .def_property_readonly("tick", &Agent::tick)
      .def_property_readonly("vi_count", [](const Agent& a) { return a.memory().vi_count(); })
      .def_property_readonly("instance_count", [](const Agent& a) { return a.memory().instance_count(); })
      .def("vis", [](const Agent& a) {
        std::vector<std::string> out;
        for (const auto& v : a.memory().vis()) out.push_back(a.render(v.id));
        return out;
      })
      .def("hls", [](const Agent& a, const std::string& purpose) {
             py::list out;
             for (const auto& [h, s] : a.ranked(*purpose_named(purpose))) {
               py::dict d;
               d["template"] = a.render(h->tmpl);
               d["support"] = s;
               py::dict ev;
               for (const auto& [type, e] : h->evidence) ev[py::str(std::string(to_string(type)))] = e;
               d["evidence"] = ev;
               out.append(d);
             }
             return out;
           },
           py::arg("purpose") = "continuation")
      .def("dump_focus", &Agent::dump_focus)
      .def("dump_shadows", &Agent::dump_shadows, py::arg("head") = std::nullopt)
      .def("dump_hls", [](const Agent& a, const std::string& p) { return a.dump_hls(*purpose_named(p)); },
           py::arg("purpose") = "continuation")
      .def("dump_memory", &Agent::dump_memory)
      .def("set_trace", &Agent::set_trace)
      .def("save", [](const Agent& a, const std::string& path) { a.save(path); });
}
