#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsmforge/spec.hpp"

namespace fsmforge::bench {

/// Raw complexity features of one benchmark sample.
struct FsmFeatures {
    std::size_t lines = 0;        // L: newline-delimited lines of the reference source
    std::size_t states = 0;       // S
    std::size_t transitions = 0;  // E
    bool operator==(const FsmFeatures&) const = default;
};

enum class Difficulty { Easy, Medium, Hard };

const char* difficulty_name(Difficulty d);

/// Classification thresholds: easy < 0.15 <= medium < 0.31 <= hard.
inline constexpr double kMediumThreshold = 0.15;
inline constexpr double kHardThreshold = 0.31;

/// Score weights; they sum to 1.
inline constexpr double kStateWeight = 0.3;
inline constexpr double kTransitionWeight = 0.5;
inline constexpr double kLineWeight = 0.2;

FsmFeatures count_fsm_features(const ir::FsmSpec& spec, const std::string& reference_source);

/// score = 0.3*(S/S_max) + 0.5*(E/E_max) + 0.2*(L/L_max). Maxima must be
/// positive and componentwise >= the features (E_BAD_MAXIMA otherwise).
double complexity_score(const FsmFeatures& f, const FsmFeatures& maxima);

/// Thresholds per the table above; E_RANGE outside [0, 1].
Difficulty classify(double score);

/// 1 - C(n-c, k)/C(n, k) in product form; exact 1 when k > n - c. E_ARGS on
/// violated preconditions (0 <= c <= n, 1 <= k <= n).
double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k);

/// Per-problem pooled syntax-error iteration ratios, averaged over
/// problems.
struct IterationCounts {
    std::uint64_t iterations = 0;
    std::uint64_t syntax_error_iterations = 0;
};
double syntax_error_rate(const std::vector<std::vector<IterationCounts>>& per_problem);

}  // namespace fsmforge::bench
