#pragma once

// Scenario files: a JSON document mapping one-to-one onto ScenarioSpec.
// Units are meters, seconds and radians throughout. Unknown keys are rejected.
//
//   {
//     "version": 1,
//     "regime": "SNCF" | "TVNC" | "TVC",
//     "t0": 0.0, "dt": 0.1, "n_steps": 250,
//     "delta_h": 0.4, "delta": 0.15, "n_tau": 3, "epsilon": 0.05,
//     "safety_radius": 0.1, "dividing_offset": 1e-4,
//     "clusters": [{"id": 1, "speed": 0.3, "heading": 0.0, "goal_tolerance": 0.05}],
//     "agents": [{"id": 1, "cluster": 1, "position": [0, 0], "role": "cooperative",
//                 "goal": [4, 0], "radius": 0.4}],
//     "failures": [{"time": 2.0, "agent": 4}],
//     "noncoop_trajectories": [{"agent": 4, "waypoints": [[0, 1, 2], [10, 1, -2]]}]
//   }

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fluidnav/errors.hpp"
#include "fluidnav/guidance.hpp"
#include "fluidnav/scenario.hpp"

namespace fluidnav {

namespace detail {

using Json = nlohmann::json;

class SchemaReader {
 public:
  void fail(const std::string& path, const std::string& message) { issues_.push_back(path + ": " + message); }
  const std::vector<std::string>& issues() const { return issues_; }

  void only_keys(const Json& object, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : object.items()) {
      bool known = false;
      for (auto name : allowed) known = known || key == name;
      if (!known) fail(join(path, key), "unknown key");
    }
  }

  bool object(const Json& node, const std::string& path) {
    if (node.is_object()) return true;
    fail(path.empty() ? "<root>" : path, "expected an object");
    return false;
  }

  template <typename Apply>
  void number(const Json& parent, const std::string& path, const char* key, bool required, Apply apply) {
    if (!parent.contains(key)) {
      if (required) fail(join(path, key), "missing required field");
      return;
    }
    const Json& v = parent.at(key);
    if (!v.is_number()) return fail(join(path, key), "expected a number");
    apply(v.get<double>());
  }

  template <typename Apply>
  void integer(const Json& parent, const std::string& path, const char* key, bool required, Apply apply) {
    if (!parent.contains(key)) {
      if (required) fail(join(path, key), "missing required field");
      return;
    }
    const Json& v = parent.at(key);
    if (!v.is_number_integer()) return fail(join(path, key), "expected an integer");
    apply(v.get<long long>());
  }

  template <typename Apply>
  void text(const Json& parent, const std::string& path, const char* key, bool required, Apply apply) {
    if (!parent.contains(key)) {
      if (required) fail(join(path, key), "missing required field");
      return;
    }
    const Json& v = parent.at(key);
    if (!v.is_string()) return fail(join(path, key), "expected a string");
    apply(v.get<std::string>());
  }

  bool point(const Json& v, const std::string& path, Complex& out) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(path, "expected [x, y]");
      return false;
    }
    out = {v[0].get<double>(), v[1].get<double>()};
    return true;
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

 private:
  std::vector<std::string> issues_;
};

inline int narrow(long long value) {
  if (value > std::numeric_limits<int>::max()) return std::numeric_limits<int>::max();
  if (value < std::numeric_limits<int>::min()) return std::numeric_limits<int>::min();
  return static_cast<int>(value);
}

inline ScenarioSpec read_spec(const Json& root) {
  SchemaReader r;
  ScenarioSpec spec;
  if (!r.object(root, "")) throw SchemaError(r.issues());
  r.only_keys(root, "", {"version", "regime", "t0", "dt", "n_steps", "delta_h", "delta", "n_tau", "epsilon",
                         "safety_radius", "dividing_offset", "clusters", "agents", "failures",
                         "noncoop_trajectories"});

  r.integer(root, "", "version", true, [&](long long v) { spec.version = narrow(v); });
  r.text(root, "", "regime", true, [&](const std::string& v) {
    if (auto regime = regime_from_string(v)) {
      spec.regime = *regime;
    } else {
      r.fail("regime", "expected one of SNCF, TVNC, TVC");
    }
  });
  r.number(root, "", "t0", false, [&](double v) { spec.t0 = v; });
  r.number(root, "", "dt", true, [&](double v) { spec.dt = v; });
  const bool budget_only = spec.regime == Regime::Tvnc;
  bool has_steps = false;
  r.integer(root, "", "n_steps", !budget_only, [&](long long v) {
    spec.n_steps = narrow(v);
    has_steps = true;
  });
  r.number(root, "", "delta_h", false, [&](double v) { spec.delta_h = v; });
  r.number(root, "", "delta", false, [&](double v) { spec.delta = v; });
  r.integer(root, "", "n_tau", false, [&](long long v) { spec.n_tau = narrow(v); });
  r.number(root, "", "epsilon", false, [&](double v) { spec.epsilon = v; });
  r.number(root, "", "safety_radius", false, [&](double v) { spec.safety_radius = v; });
  r.number(root, "", "dividing_offset", false, [&](double v) { spec.dividing_offset = v; });

  if (!root.contains("clusters") || !root["clusters"].is_array()) {
    r.fail("clusters", "expected an array");
  } else {
    for (std::size_t i = 0; i < root["clusters"].size(); ++i) {
      const Json& node = root["clusters"][i];
      const std::string path = "clusters[" + std::to_string(i) + "]";
      if (!r.object(node, path)) continue;
      r.only_keys(node, path, {"id", "speed", "heading", "goal_tolerance"});
      ClusterSpec c;
      c.goal_tolerance = spec.epsilon;
      r.integer(node, path, "id", true, [&](long long v) { c.id = narrow(v); });
      r.number(node, path, "speed", true, [&](double v) { c.speed = v; });
      r.number(node, path, "heading", false, [&](double v) { c.heading = v; });
      r.number(node, path, "goal_tolerance", false, [&](double v) { c.goal_tolerance = v; });
      spec.clusters.push_back(c);
    }
  }

  if (!root.contains("agents") || !root["agents"].is_array()) {
    r.fail("agents", "expected an array");
  } else {
    for (std::size_t i = 0; i < root["agents"].size(); ++i) {
      const Json& node = root["agents"][i];
      const std::string path = "agents[" + std::to_string(i) + "]";
      if (!r.object(node, path)) continue;
      r.only_keys(node, path, {"id", "cluster", "position", "role", "goal", "radius"});
      AgentState a;
      r.integer(node, path, "id", true, [&](long long v) { a.id = narrow(v); });
      r.integer(node, path, "cluster", true, [&](long long v) { a.cluster = narrow(v); });
      if (!node.contains("position")) {
        r.fail(path + ".position", "missing required field");
      } else {
        r.point(node["position"], path + ".position", a.position);
      }
      r.text(node, path, "role", false, [&](const std::string& v) {
        if (auto role = role_from_string(v)) {
          a.role = *role;
        } else {
          r.fail(path + ".role", "expected cooperative, faulty or noncooperative");
        }
      });
      if (node.contains("goal")) {
        Complex goal;
        if (r.point(node["goal"], path + ".goal", goal)) a.goal = goal;
      }
      r.number(node, path, "radius", false, [&](double v) { a.radius = v; });
      spec.agents.push_back(a);
    }
  }

  if (root.contains("failures")) {
    if (!root["failures"].is_array()) {
      r.fail("failures", "expected an array");
    } else {
      for (std::size_t i = 0; i < root["failures"].size(); ++i) {
        const Json& node = root["failures"][i];
        const std::string path = "failures[" + std::to_string(i) + "]";
        if (!r.object(node, path)) continue;
        r.only_keys(node, path, {"time", "agent"});
        FailureEvent f;
        r.number(node, path, "time", true, [&](double v) { f.time = v; });
        r.integer(node, path, "agent", true, [&](long long v) { f.agent_id = narrow(v); });
        spec.failures.push_back(f);
      }
    }
  }

  if (root.contains("noncoop_trajectories")) {
    if (!root["noncoop_trajectories"].is_array()) {
      r.fail("noncoop_trajectories", "expected an array");
    } else {
      for (std::size_t i = 0; i < root["noncoop_trajectories"].size(); ++i) {
        const Json& node = root["noncoop_trajectories"][i];
        const std::string path = "noncoop_trajectories[" + std::to_string(i) + "]";
        if (!r.object(node, path)) continue;
        r.only_keys(node, path, {"agent", "waypoints"});
        PresetTrajectory p;
        r.integer(node, path, "agent", true, [&](long long v) { p.agent_id = narrow(v); });
        if (!node.contains("waypoints") || !node["waypoints"].is_array()) {
          r.fail(path + ".waypoints", "expected an array of [t, x, y]");
        } else {
          for (std::size_t k = 0; k < node["waypoints"].size(); ++k) {
            const Json& w = node["waypoints"][k];
            if (!w.is_array() || w.size() != 3 || !w[0].is_number() || !w[1].is_number() || !w[2].is_number()) {
              r.fail(path + ".waypoints[" + std::to_string(k) + "]", "expected [t, x, y]");
              continue;
            }
            p.waypoints.push_back({w[0].get<double>(), {w[1].get<double>(), w[2].get<double>()}});
          }
        }
        spec.noncoop_trajectories.push_back(std::move(p));
      }
    }
  }

  if (!r.issues().empty()) throw SchemaError(r.issues());

  for (auto& c : spec.clusters) {
    for (const auto& a : spec.agents) {
      if (a.cluster == c.id) c.members.push_back(a.id);
    }
    std::sort(c.members.begin(), c.members.end());
  }
  if (budget_only && !has_steps) spec.n_steps = default_step_budget(spec);
  return spec;
}

inline std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace detail

// Parses and fully validates a scenario document. Throws SyntaxError (with
// line/column), SchemaError or RegimeError.
inline ScenarioSpec parse_scenario_text(std::string_view text, const std::string& source = "<scenario>") {
  detail::Json root;
  try {
    root = detail::Json::parse(text.begin(), text.end());
  } catch (const detail::Json::parse_error& e) {
    const auto [line, column] = detail::line_and_column(text, e.byte);
    throw SyntaxError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what(), line,
                      column);
  }
  ScenarioSpec spec = detail::read_spec(root);
  validate_spec(spec);
  return spec;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return buffer.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

inline ScenarioSpec parse_scenario(const std::string& path) {
  return parse_scenario_text(read_text_file(path), path);
}

inline std::string serialize_scenario(const ScenarioSpec& spec) {
  using detail::Json;
  auto point = [](Complex z) { return Json::array({z.real(), z.imag()}); };
  Json root = Json::object();
  root["version"] = spec.version;
  root["regime"] = to_string(spec.regime);
  root["t0"] = spec.t0;
  root["dt"] = spec.dt;
  root["n_steps"] = spec.n_steps;
  root["delta_h"] = spec.delta_h;
  root["delta"] = spec.delta;
  root["n_tau"] = spec.n_tau;
  root["epsilon"] = spec.epsilon;
  root["safety_radius"] = spec.safety_radius;
  root["dividing_offset"] = spec.dividing_offset;
  root["clusters"] = Json::array();
  for (const auto& c : spec.clusters) {
    root["clusters"].push_back(
        {{"id", c.id}, {"speed", c.speed}, {"heading", c.heading}, {"goal_tolerance", c.goal_tolerance}});
  }
  root["agents"] = Json::array();
  for (const auto& a : spec.agents) {
    Json node = {{"id", a.id}, {"cluster", a.cluster}, {"position", point(a.position)}, {"role", to_string(a.role)}};
    if (a.goal) node["goal"] = point(*a.goal);
    if (a.radius) node["radius"] = *a.radius;
    root["agents"].push_back(node);
  }
  if (!spec.failures.empty()) {
    root["failures"] = Json::array();
    for (const auto& f : spec.failures) root["failures"].push_back({{"time", f.time}, {"agent", f.agent_id}});
  }
  if (!spec.noncoop_trajectories.empty()) {
    root["noncoop_trajectories"] = Json::array();
    for (const auto& p : spec.noncoop_trajectories) {
      Json waypoints = Json::array();
      for (const auto& w : p.waypoints) {
        waypoints.push_back(Json::array({w.time, w.position.real(), w.position.imag()}));
      }
      root["noncoop_trajectories"].push_back({{"agent", p.agent_id}, {"waypoints", waypoints}});
    }
  }
  return root.dump(2) + "\n";
}

}  // namespace fluidnav
