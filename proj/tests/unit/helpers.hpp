#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "fsmforge/spec.hpp"

namespace test_helpers {

// Two-state toggle machine used across the suites: OFF --go==1/<out=1>--> ON,
// ON --go==1--> OFF, Moore out = 0/1.
inline const char* kToggleJson = R"({
  "name": "toggle",
  "clock": {"name": "clk", "edge": "rising"},
  "reset": {"name": "rst", "active": "high", "kind": "synchronous"},
  "inputs": [{"name": "go", "width": 1}],
  "outputs": [{"name": "out", "width": 1}],
  "registers": [],
  "initial": "OFF",
  "encoding": "binary",
  "states": [
    {"name": "OFF", "moore": {"out": 0},
     "transitions": [{"guard": "go == 1", "target": "ON", "actions": {"out": "1"}}]},
    {"name": "ON", "moore": {"out": 1},
     "transitions": [{"guard": "go == 1", "target": "OFF"}]}
  ]
})";

inline fsmforge::ir::FsmSpec toggle_spec() {
    auto r = fsmforge::ir::parse_ir(kToggleJson);
    if (!r.ok()) throw std::runtime_error("toggle fixture does not parse");
    return *r;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

#ifndef FSMFORGE_FIXTURE_DIR
#error "FSMFORGE_FIXTURE_DIR must be defined by the build"
#endif

inline std::string fixture_path(const std::string& name) {
    return std::string(FSMFORGE_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture(const std::string& name) { return read_file(fixture_path(name)); }

}  // namespace test_helpers
