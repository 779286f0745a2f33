#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fsmforge {

enum class Severity { Error, Warning };

/// A single validation or parse finding. `path` is a JSON pointer into the
/// offending document element; `code` is stable across releases.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    std::string path;

    bool operator==(const Diagnostic&) const = default;
};

inline Diagnostic make_error(std::string code, std::string message, std::string path = "") {
    return Diagnostic{Severity::Error, std::move(code), std::move(message), std::move(path)};
}

inline Diagnostic make_warning(std::string code, std::string message, std::string path = "") {
    return Diagnostic{Severity::Warning, std::move(code), std::move(message), std::move(path)};
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

inline const char* severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

/// Value-or-diagnostics result. A missing value implies at least one error
/// diagnostic; a present value may still carry warnings.
template <typename T>
struct Result {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.has_value(); }
    T& operator*() { return *value; }
    const T& operator*() const { return *value; }
    T* operator->() { return &*value; }
    const T* operator->() const { return &*value; }

    static Result success(T v) { return Result{std::move(v), {}}; }
    static Result failure(std::vector<Diagnostic> diags) { return Result{std::nullopt, std::move(diags)}; }
    static Result failure(Diagnostic d) { return Result{std::nullopt, {std::move(d)}}; }
};

/// Thrown on violated API preconditions (caller bugs), never on bad user
/// input. `code` matches the stable identifiers used by diagnostics.
class ContractError : public std::runtime_error {
public:
    ContractError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace fsmforge
