#include "fsmforge/encode.hpp"

#include "fsmforge/diag.hpp"

namespace fsmforge::codegen {

std::uint64_t EncodingMap::code_of(const std::string& state_name) const {
    for (const auto& [name, code] : assignments)
        if (name == state_name) return code;
    throw ContractError("E_EMIT_INTERNAL", "no code for state '" + state_name + "'");
}

std::string EncodingMap::state_of(std::uint64_t code) const {
    for (const auto& [name, c] : assignments)
        if (c == code) return name;
    return "";
}

EncodingMap encode_states(const ir::FsmSpec& spec, ir::Encoding scheme) {
    EncodingMap map;
    map.scheme = scheme;
    const std::size_t n = spec.states.size();
    if (scheme == ir::Encoding::Binary) {
        int width = 1;
        while ((std::uint64_t{1} << width) < n) ++width;
        map.state_width = width;
        for (std::size_t i = 0; i < n; ++i)
            map.assignments.emplace_back(spec.states[i].name, static_cast<std::uint64_t>(i));
    } else {
        map.state_width = static_cast<int>(n);
        for (std::size_t i = 0; i < n; ++i)
            map.assignments.emplace_back(spec.states[i].name, std::uint64_t{1} << i);
    }
    return map;
}

}  // namespace fsmforge::codegen
