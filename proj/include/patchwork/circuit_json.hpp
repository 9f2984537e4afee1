#pragma once

// JSON form of CanonicalCircuit (schema version 1):
//   {"version": 1, "num_qubits": n,
//    "layers": [[{"axis": "+XZ", "angle": "1/8"}, ...], ...],
//    "measurements": ["+ZI", "-IX"],
//    "clifford_frame": [{"axis": "+ZI", "angle": "1/4"}, ...],
//    "metrics": {"t_count": .., "t_depth": .., "rotation_count": .., "rotation_depth": ..}}
// Angles use Angle::str() (units of pi, or radians with an "r" suffix).

#include <json.hpp>

#include "patchwork/transpiler.hpp"

namespace patchwork {

inline constexpr int kCanonicalJsonVersion = 1;

inline nlohmann::json to_json(const PauliRotation &r) { return {{"axis", r.axis.str()}, {"angle", r.angle.str()}}; }

inline nlohmann::json to_json(const CircuitMetrics &m) {
    return {{"t_count", m.t_count},
            {"t_depth", m.t_depth},
            {"rotation_count", m.rotation_count},
            {"rotation_depth", m.rotation_depth}};
}

inline nlohmann::json to_json(const CanonicalCircuit &c) {
    nlohmann::json j;
    j["version"] = kCanonicalJsonVersion;
    j["num_qubits"] = c.num_qubits;
    j["layers"] = nlohmann::json::array();
    for (auto &l : c.layers) {
        auto arr = nlohmann::json::array();
        for (auto &r : l.rotations) arr.push_back(to_json(r));
        j["layers"].push_back(arr);
    }
    j["measurements"] = nlohmann::json::array();
    for (auto &m : c.measurements) j["measurements"].push_back(m.str());
    j["clifford_frame"] = nlohmann::json::array();
    for (auto &r : c.clifford_frame) j["clifford_frame"].push_back(to_json(r));
    j["metrics"] = to_json(metrics(c));
    return j;
}

inline CanonicalCircuit canonical_from_json(const nlohmann::json &j) {
    try {
        if (j.at("version").get<int>() != kCanonicalJsonVersion)
            throw ParseError("unsupported canonical circuit version " + j.at("version").dump());
        CanonicalCircuit c;
        c.num_qubits = j.at("num_qubits").get<size_t>();
        auto rot = [&](const nlohmann::json &r) {
            PauliRotation out(PauliString::from_str(r.at("axis").get<std::string>()),
                              Angle::parse(r.at("angle").get<std::string>()));
            if (out.num_qubits() != c.num_qubits) throw ParseError("rotation width mismatch");
            return out;
        };
        for (auto &l : j.at("layers")) {
            RotationLayer layer;
            for (auto &r : l) layer.rotations.push_back(rot(r));
            c.layers.push_back(layer);
        }
        for (auto &m : j.at("measurements")) c.measurements.emplace_back(PauliString::from_str(m.get<std::string>()));
        for (auto &r : j.at("clifford_frame")) c.clifford_frame.push_back(rot(r));
        if (!layers_valid(c)) throw ParseError("layer contains anticommuting or repeated axes");
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("canonical circuit json: ") + e.what());
    }
}

}  // namespace patchwork
