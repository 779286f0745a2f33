#include "fsmforge/metrics.hpp"

#include <algorithm>

namespace fsmforge::bench {

const char* difficulty_name(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "?";
}

FsmFeatures count_fsm_features(const ir::FsmSpec& spec, const std::string& reference_source) {
    FsmFeatures f;
    f.states = spec.states.size();
    f.transitions = spec.transition_count();
    // Raw newline-delimited lines, comments and blanks included; a missing
    // final newline still counts the last line.
    if (!reference_source.empty()) {
        f.lines = static_cast<std::size_t>(
            std::count(reference_source.begin(), reference_source.end(), '\n'));
        if (reference_source.back() != '\n') ++f.lines;
    }
    return f;
}

double complexity_score(const FsmFeatures& f, const FsmFeatures& maxima) {
    if (maxima.lines == 0 || maxima.states == 0 || maxima.transitions == 0)
        throw ContractError("E_BAD_MAXIMA", "maxima components must be positive");
    if (f.lines > maxima.lines || f.states > maxima.states || f.transitions > maxima.transitions)
        throw ContractError("E_BAD_MAXIMA", "features exceed the stated maxima");
    double s = static_cast<double>(f.states) / static_cast<double>(maxima.states);
    double e = static_cast<double>(f.transitions) / static_cast<double>(maxima.transitions);
    double l = static_cast<double>(f.lines) / static_cast<double>(maxima.lines);
    return kStateWeight * s + kTransitionWeight * e + kLineWeight * l;
}

Difficulty classify(double score) {
    if (!(score >= 0.0) || score > 1.0)
        throw ContractError("E_RANGE", "score must be in [0, 1]");
    if (score < kMediumThreshold) return Difficulty::Easy;
    if (score < kHardThreshold) return Difficulty::Medium;
    return Difficulty::Hard;
}

double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k) {
    if (c > n || k < 1 || k > n)
        throw ContractError("E_ARGS", "pass@k requires 0 <= c <= n and 1 <= k <= n");
    if (k > n - c) return 1.0;
    // 1 - prod_{i=0}^{k-1} (n-c-i)/(n-i): no factorials, no overflow.
    double miss = 1.0;
    for (std::uint64_t i = 0; i < k; ++i)
        miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
    return 1.0 - miss;
}

double syntax_error_rate(const std::vector<std::vector<IterationCounts>>& per_problem) {
    if (per_problem.empty()) throw ContractError("E_EMPTY", "no problems");
    double sum = 0.0;
    for (const auto& group : per_problem) {
        if (group.empty()) throw ContractError("E_EMPTY", "empty problem group");
        std::uint64_t iterations = 0, errors = 0;
        for (const auto& rec : group) {
            if (rec.iterations < 1)
                throw ContractError("E_ARGS", "iteration count must be >= 1");
            if (rec.syntax_error_iterations > rec.iterations)
                throw ContractError("E_ARGS", "syntax-error iterations exceed iterations");
            iterations += rec.iterations;
            errors += rec.syntax_error_iterations;
        }
        sum += static_cast<double>(errors) / static_cast<double>(iterations);
    }
    return sum / static_cast<double>(per_problem.size());
}

}  // namespace fsmforge::bench
