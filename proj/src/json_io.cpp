// Copyright 2026 The uqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <stdexcept>

#include "uqnn/report_io.hpp"

namespace uqnn {

nlohmann::json circuit_to_json(const Circuit &c) {
    nlohmann::json gates = nlohmann::json::array();
    for (const Gate &g : c.gates()) {
        nlohmann::json qubits = nlohmann::json::array({g.q0});
        if (g.two_qubit()) {
            qubits.push_back(g.q1);
        }
        gates.push_back({{"kind", gate_kind_name(g.kind)}, {"qubits", qubits}, {"theta", g.theta}});
    }
    return {{"n_qubits", c.n_qubits()}, {"gates", gates}};
}

Circuit circuit_from_json(const nlohmann::json &j) {
    Circuit c(j.at("n_qubits").get<size_t>());
    for (const auto &g : j.at("gates")) {
        const GateKind kind = gate_kind_from_name(g.at("kind").get<std::string>());
        const auto qubits = g.at("qubits").get<std::vector<size_t>>();
        Gate gate;
        gate.kind = kind;
        gate.theta = g.value("theta", 0.0);
        const size_t arity = gate.kind == GateKind::RBS || gate.kind == GateKind::CZ || gate.kind == GateKind::CNOT
                                 ? 2
                                 : 1;
        if (qubits.size() != arity) {
            throw std::invalid_argument("circuit json: gate " + std::string(gate_kind_name(kind)) + " needs " +
                                        std::to_string(arity) + " qubits");
        }
        gate.q0 = qubits[0];
        gate.q1 = arity == 2 ? qubits[1] : qubits[0];
        c.add(gate);
    }
    return c;
}

}  // namespace uqnn
