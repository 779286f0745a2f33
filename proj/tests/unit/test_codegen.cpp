#include <doctest.h>

#include <algorithm>
#include <set>

#include "fsmforge/emit.hpp"
#include "fsmforge/exec.hpp"
#include "fsmforge/netlist.hpp"
#include "fsmforge/randspec.hpp"
#include "helpers.hpp"

using namespace fsmforge;
using namespace fsmforge::codegen;
using test_helpers::toggle_spec;

namespace {

ir::FsmSpec n_state_spec(std::size_t n) {
    auto spec = toggle_spec();
    spec.states.clear();
    for (std::size_t i = 0; i < n; ++i) {
        ir::StateDef s;
        s.name = "Q" + std::to_string(i);
        ir::Transition t;
        t.guard = ir::Expr::always_true();
        t.target = "Q" + std::to_string((i + 1) % n);
        s.transitions.push_back(std::move(t));
        spec.states.push_back(std::move(s));
    }
    spec.initial = "Q0";
    return spec;
}

}  // namespace

TEST_CASE("binary encoding widths and codes") {
    auto two = encode_states(n_state_spec(2), ir::Encoding::Binary);
    CHECK(two.state_width == 1);
    CHECK(two.assignments[0] == std::pair<std::string, std::uint64_t>{"Q0", 0});
    CHECK(two.assignments[1] == std::pair<std::string, std::uint64_t>{"Q1", 1});

    CHECK(encode_states(n_state_spec(5), ir::Encoding::Binary).state_width == 3);
    CHECK(encode_states(n_state_spec(1), ir::Encoding::Binary).state_width == 1);
}

TEST_CASE("onehot encoding: one bit per state") {
    auto enc = encode_states(n_state_spec(4), ir::Encoding::Onehot);
    CHECK(enc.state_width == 4);
    std::set<std::uint64_t> codes;
    for (const auto& [name, code] : enc.assignments) {
        CHECK(__builtin_popcountll(code) == 1);
        codes.insert(code);
    }
    CHECK(codes == std::set<std::uint64_t>{1, 2, 4, 8});
}

TEST_CASE("encoding is bijective for random specs") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto spec = ir::gen_random_spec(seed);
        for (auto scheme : {ir::Encoding::Binary, ir::Encoding::Onehot}) {
            auto enc = encode_states(spec, scheme);
            std::set<std::uint64_t> codes;
            for (const auto& [name, code] : enc.assignments) codes.insert(code);
            CHECK(codes.size() == spec.states.size());
        }
    }
}

TEST_CASE("golden emission: toggle with overridden clock and reset") {
    EmitOptions opts;
    opts.clock_name = "clk_i";
    opts.reset_name = "rst_ni";
    opts.reset_active = ir::ResetActive::Low;
    opts.reset_kind = ir::ResetKind::Asynchronous;
    std::string text = emit_verilog(toggle_spec(), opts);
    CHECK(text == test_helpers::fixture("golden/toggle_async.v"));

    // Port-name fidelity and structure spot checks.
    CHECK(text.find("input  wire clk_i") != std::string::npos);
    CHECK(text.find("input  wire rst_ni") != std::string::npos);
    CHECK(text.find("localparam S_OFF") != std::string::npos);
    CHECK(text.find("localparam S_ON") != std::string::npos);
    CHECK(text.find("default: begin") != std::string::npos);
    CHECK(text.find("negedge rst_ni") != std::string::npos);
}

TEST_CASE("emission is byte deterministic") {
    EmitOptions opts;
    auto spec = toggle_spec();
    CHECK(emit_verilog(spec, opts) == emit_verilog(spec, opts));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto rnd = ir::gen_random_spec(seed);
        CHECK(emit_verilog(rnd, {}) == emit_verilog(rnd, {}));
    }
}

TEST_CASE("emit rejects an unvalidated spec") {
    auto spec = toggle_spec();
    spec.initial = "GHOST";
    CHECK_THROWS_AS(emit_verilog(spec, {}), ContractError);
}

TEST_CASE("option overrides must not collide with signals") {
    EmitOptions opts;
    opts.clock_name = "go";  // already an input
    auto merged = apply_emit_options(toggle_spec(), opts);
    CHECK_FALSE(merged.ok());
}

TEST_CASE("emitted text parses back for every random spec and option set") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CAPTURE(seed);
        auto spec = ir::gen_random_spec(seed);
        std::string text = emit_verilog(spec, {});
        auto model = parse_emitted_verilog(text);
        REQUIRE(model.ok());
        // Ports must mirror the spec exactly.
        REQUIRE(model->inputs.size() == spec.inputs.size());
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
            CHECK(model->inputs[i].name == spec.inputs[i].name);
            CHECK(model->inputs[i].width == spec.inputs[i].width);
        }
        REQUIRE(model->outputs.size() == spec.outputs.size());
        CHECK(model->clock_name == spec.clock.name);
        CHECK(model->reset_name == spec.reset.name);
        CHECK(model->reset_kind == spec.reset.kind);
    }
}

TEST_CASE("name mangling avoids declared signals") {
    auto spec = toggle_spec();
    spec.registers.push_back({"state", 2, 0});       // collides with the state register
    spec.registers.push_back({"state_next", 2, 0});  // and with its next-value net
    REQUIRE(ir::validate(spec).empty());
    std::string text = emit_verilog(spec, {});
    auto model = parse_emitted_verilog(text);
    REQUIRE(model.ok());
    CHECK(model->inputs.size() == spec.inputs.size());
}

TEST_CASE("subset parser rejects foreign constructs") {
    std::string text = emit_verilog(toggle_spec(), {});
    auto pos = text.find("  reg state;");
    REQUIRE(pos != std::string::npos);
    std::string infected = text;
    infected.insert(pos, "  generate fancy endgenerate\n");
    auto r = parse_emitted_verilog(infected);
    CHECK_FALSE(r.ok());
    CHECK(r.diagnostics[0].code == "E_SUBSET");
    CHECK(r.diagnostics[0].message.find("generate") != std::string::npos);
}

TEST_CASE("corrupted emission reports the failing line") {
    // Deleting the first endcase makes the parser stumble on the 'end' that
    // closes the surrounding always block, one line after the removed one.
    std::string text = test_helpers::fixture("golden/toggle_async.v");
    auto pos = text.find("    endcase\n");
    REQUIRE(pos != std::string::npos);
    std::size_t endcase_line = 1 + std::count(text.begin(), text.begin() + pos, '\n');
    std::string corrupted = text.substr(0, pos) + text.substr(pos + 12);
    auto r = parse_emitted_verilog(corrupted);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].code == "E_VPARSE");
    // The offending 'end' sat on the next line and moved up by one.
    std::string expected_prefix = std::to_string(endcase_line) + ":";
    CHECK(r.diagnostics[0].path.substr(0, expected_prefix.size()) == expected_prefix);
    CHECK(r.diagnostics[0].message.find("line " + std::to_string(endcase_line)) !=
          std::string::npos);
}

TEST_CASE("yaml golden and determinism") {
    auto y1 = emit_yaml(toggle_spec());
    auto y2 = emit_yaml(toggle_spec());
    REQUIRE(y1.ok());
    REQUIRE(y2.ok());
    CHECK(*y1 == *y2);
    CHECK(*y1 == test_helpers::fixture("golden/toggle.yaml"));
    // State keys stay quoted so YAML typing cannot eat OFF/ON.
    CHECK(y1->find("\"OFF\":") != std::string::npos);
    CHECK(y1->find("\"ON\":") != std::string::npos);
    CHECK(y1->find("<out = 1>") != std::string::npos);
}

TEST_CASE("yaml flags unrepresentable features by name") {
    auto spec = toggle_spec();
    spec.reset.kind = ir::ResetKind::Asynchronous;
    auto r = emit_yaml(spec);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].code == "E_YAML_UNREPRESENTABLE");
    CHECK(r.diagnostics[0].message.find("asynchronous reset") != std::string::npos);

    spec = toggle_spec();
    spec.clock.edge = ir::ClockEdge::Falling;
    r = emit_yaml(spec);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].message.find("falling-edge clock") != std::string::npos);
}
