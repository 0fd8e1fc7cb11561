#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtk/action.hpp"
#include "qtk/gns.hpp"
#include "qtk/graph.hpp"
#include "qtk/weak_haagerup.hpp"

namespace qtk {

using ordered_json = nlohmann::ordered_json;

// Graph file: {"n": int, "edges": [[u,v],...], "labels": {"0": "root", ...}?}
inline Graph graph_from_json(const ordered_json& j) {
  try {
    const Vertex n = j.at("n").get<Vertex>();
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) fail(ErrorCode::InvalidSpec, "edge must be a pair");
      edges.emplace_back(e[0].get<Vertex>(), e[1].get<Vertex>());
    }
    std::map<Vertex, std::string> labels;
    if (j.contains("labels"))
      for (const auto& [key, value] : j.at("labels").items())
        labels[static_cast<Vertex>(std::stoul(key))] = value.get<std::string>();
    return Graph(n, std::move(edges), std::move(labels));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("malformed graph json: ") + e.what());
  }
}

inline ordered_json graph_to_json(const Graph& g) {
  ordered_json j;
  j["n"] = g.vertex_count();
  ordered_json edges = ordered_json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  if (!g.labels().empty()) {
    ordered_json labels;
    for (const auto& [v, label] : g.labels()) labels[std::to_string(v)] = label;
    j["labels"] = std::move(labels);
  }
  return j;
}

// Vector file: {"coeffs": {"vertex": value, ...}}
inline MeanZeroVector vector_from_json(const ordered_json& j) {
  try {
    std::vector<std::pair<std::uint32_t, double>> coeffs;
    for (const auto& [key, value] : j.at("coeffs").items())
      coeffs.emplace_back(static_cast<std::uint32_t>(std::stoul(key)), value.get<double>());
    return MeanZeroVector::from_coeffs(std::move(coeffs));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("malformed vector json: ") + e.what());
  }
}

inline ordered_json vector_to_json(const MeanZeroVector& v) {
  ordered_json coeffs;
  for (const auto& [p, c] : v.entries()) coeffs[std::to_string(p)] = c;
  ordered_json j;
  j["coeffs"] = std::move(coeffs);
  return j;
}

// Weak-Haagerup file: {"elements": [...], "phi": {"n": value},
//                      "R": {"n": [floats]}, "S": {"n": [floats]}}
inline WeakHaagerupData wh_from_json(const ordered_json& j) {
  try {
    WeakHaagerupData data;
    for (const auto& e : j.at("elements")) data.elements.push_back(e.get<std::int64_t>());
    for (const auto& [key, value] : j.at("phi").items())
      data.phi[std::stoll(key)] = value.get<double>();
    for (const auto& [key, value] : j.at("R").items())
      data.r_vectors[std::stoll(key)] = value.get<std::vector<double>>();
    for (const auto& [key, value] : j.at("S").items())
      data.s_vectors[std::stoll(key)] = value.get<std::vector<double>>();
    return data;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("malformed weak-haagerup json: ") + e.what());
  }
}

inline ordered_json wh_to_json(const WeakHaagerupData& data) {
  ordered_json j;
  j["elements"] = data.elements;
  ordered_json phi, r, s;
  for (const auto& [n, value] : data.phi) phi[std::to_string(n)] = value;
  for (const auto& [n, value] : data.r_vectors) r[std::to_string(n)] = value;
  for (const auto& [n, value] : data.s_vectors) s[std::to_string(n)] = value;
  j["phi"] = std::move(phi);
  j["R"] = std::move(r);
  j["S"] = std::move(s);
  return j;
}

// Action file: {"generators": {"a": [perm] | "cycle_rotation" | "free_group_rank_k"},
//               "basepoint": v, "word_cap": n, "radius": r?}
struct ParsedAction {
  std::unique_ptr<Action> action;
  std::uint32_t word_cap = 4;
  bool free_group = false;
};

inline ParsedAction action_from_json(const ordered_json& j, const Graph* graph) {
  try {
    ParsedAction parsed;
    parsed.word_cap = j.value("word_cap", 4u);
    const auto& generators = j.at("generators");

    for (const auto& [name, value] : generators.items()) {
      (void)name;
      if (value.is_string() && value.get<std::string>().rfind("free_group_rank_", 0) == 0) {
        const std::size_t rank = std::stoul(value.get<std::string>().substr(16));
        const std::uint32_t radius = j.value("radius", 2 * parsed.word_cap);
        parsed.action = std::make_unique<FreeGroupTreeAction>(rank, radius);
        parsed.free_group = true;
        return parsed;
      }
    }

    if (!graph) fail(ErrorCode::InvalidConfig, "this action needs --graph");
    const Vertex basepoint = j.value("basepoint", 0u);
    std::vector<std::pair<std::string, std::vector<Vertex>>> perms;
    for (const auto& [name, value] : generators.items()) {
      if (value.is_string()) {
        const std::string rule = value.get<std::string>();
        if (rule == "cycle_rotation") {
          const Vertex n = graph->vertex_count();
          for (Vertex v = 0; v < n; ++v)
            if (graph->neighbors(v).size() != 2)
              fail(ErrorCode::InvalidSpec, "cycle_rotation needs a cycle graph");
          std::vector<Vertex> rot(n);
          for (Vertex v = 0; v < n; ++v) rot[v] = (v + 1) % n;
          perms.emplace_back(name, std::move(rot));
        } else if (rule == "graph_automorphism") {
          fail(ErrorCode::InvalidSpec,
               "graph_automorphism takes an explicit permutation array");
        } else {
          fail(ErrorCode::InvalidSpec, "unknown rule '" + rule + "'");
        }
      } else {
        perms.emplace_back(name, value.get<std::vector<Vertex>>());
      }
    }
    parsed.action = std::make_unique<GraphAutomorphismAction>(*graph, std::move(perms), basepoint);
    return parsed;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("malformed action json: ") + e.what());
  }
}

// ---- report fragments ----

inline ordered_json verdict_to_json(const Verdict& v) {
  ordered_json j;
  j["pass"] = v.pass;
  if (!v.pass) j["detail"] = v.detail;
  return j;
}

inline ordered_json spectrum_to_json(const SpectrumReport& s) {
  ordered_json j;
  j["min_eigenvalue"] = s.min_eigenvalue;
  j["tolerance"] = s.tolerance;
  j["psd"] = s.psd;
  return j;
}

inline ordered_json sandwich_to_json(const SandwichReport& s) {
  ordered_json j;
  j["delta"] = s.delta;
  j["delta_prime"] = s.delta_prime;
  j["delta_x"] = s.delta_x;
  j["max_gap"] = s.max_gap;
  j["pass"] = s.pass();
  if (!s.violations.empty()) {
    ordered_json list = ordered_json::array();
    for (const auto& v : s.violations)
      list.push_back({{"a", v.a}, {"x", v.x}, {"y", v.y}, {"d", v.d}, {"d_a", v.d_a}});
    j["violations"] = std::move(list);
  }
  return j;
}

inline ordered_json cnd_to_json(const CndReport& c) {
  ordered_json j;
  j["cnd"] = c.cnd;
  j["projected"] = spectrum_to_json(c.projected);
  return j;
}

inline ordered_json certificate_to_json(const CndCertificate& c) {
  ordered_json j;
  j["mode"] = c.mode;
  j["points_checked"] = c.points_checked;
  j["min_eigenvalue"] = c.min_eigenvalue;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  return j;
}

}  // namespace qtk
