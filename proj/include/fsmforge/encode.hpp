#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsmforge/spec.hpp"

namespace fsmforge::codegen {

/// State-to-code assignment. Binary: state i gets code i, width
/// ceil(log2(max(2, n))). Onehot: state i gets bit i, width n.
struct EncodingMap {
    ir::Encoding scheme = ir::Encoding::Binary;
    int state_width = 1;
    std::vector<std::pair<std::string, std::uint64_t>> assignments;  // declaration order

    std::uint64_t code_of(const std::string& state_name) const;
    /// Name of the state holding `code`; empty when no state matches.
    std::string state_of(std::uint64_t code) const;
};

EncodingMap encode_states(const ir::FsmSpec& spec, ir::Encoding scheme);

}  // namespace fsmforge::codegen
