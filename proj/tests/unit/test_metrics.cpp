#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "fsmforge/benchio.hpp"
#include "fsmforge/metrics.hpp"
#include "helpers.hpp"

using namespace fsmforge;
using namespace fsmforge::bench;
using test_helpers::toggle_spec;

namespace {

// Independent oracle: enumerate every k-subset of n attempts (bitmask with
// popcount k), mark the first c as passing, and count subsets containing at
// least one passer.
double pass_at_k_bruteforce(unsigned n, unsigned c, unsigned k) {
    std::uint64_t with_pass = 0, total = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (static_cast<unsigned>(__builtin_popcountll(mask)) != k) continue;
        ++total;
        if (mask & ((std::uint64_t{1} << c) - 1)) ++with_pass;
    }
    return static_cast<double>(with_pass) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("pass@k matches exhaustive enumeration for n <= 10") {
    for (unsigned n = 1; n <= 10; ++n)
        for (unsigned c = 0; c <= n; ++c)
            for (unsigned k = 1; k <= n; ++k) {
                CAPTURE(n);
                CAPTURE(c);
                CAPTURE(k);
                double expected = pass_at_k_bruteforce(n, c, k);
                double actual = pass_at_k(n, c, k);
                CHECK(std::abs(actual - expected) <= 1e-12);
            }
}

TEST_CASE("pass@k named examples") {
    CHECK(pass_at_k(1, 1, 1) == 1.0);
    CHECK(pass_at_k(1, 0, 1) == 0.0);
    CHECK(std::abs(pass_at_k(10, 3, 1) - 0.3) <= 1e-12);
    CHECK(pass_at_k(5, 2, 5) == 1.0);  // k > n - c forces a passer
}

TEST_CASE("pass@k stays stable at large n") {
    // Product form: no factorial overflow for n = 10^4.
    double v = pass_at_k(10000, 100, 10);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("pass@k monotonicity") {
    for (unsigned n : {5u, 8u}) {
        for (unsigned c = 0; c <= n; ++c)
            for (unsigned k = 2; k <= n; ++k)
                CHECK(pass_at_k(n, c, k) >= pass_at_k(n, c, k - 1) - 1e-15);
        for (unsigned k = 1; k <= n; ++k)
            for (unsigned c = 1; c <= n; ++c)
                CHECK(pass_at_k(n, c, k) >= pass_at_k(n, c - 1, k) - 1e-15);
    }
}

TEST_CASE("pass@k argument validation") {
    CHECK_THROWS_AS(pass_at_k(5, 6, 1), ContractError);
    CHECK_THROWS_AS(pass_at_k(5, 0, 0), ContractError);
    CHECK_THROWS_AS(pass_at_k(5, 0, 6), ContractError);
}

TEST_CASE("complexity score: weights sum to one") {
    CHECK(kStateWeight + kTransitionWeight + kLineWeight == 1.0);
}

TEST_CASE("complexity score: hand-computed examples") {
    // f = maxima -> every normalized term is 1, so the score is the weight
    // sum, exactly 1.
    FsmFeatures f{100, 10, 25};
    CHECK(complexity_score(f, f) == 1.0);

    // 0.3*(3/10) + 0.5*(5/25) + 0.2*(20/100) = 0.09 + 0.10 + 0.04 = 0.23
    FsmFeatures g{20, 3, 5};
    FsmFeatures maxima{100, 10, 25};
    CHECK(std::abs(complexity_score(g, maxima) - 0.23) <= 1e-12);
}

TEST_CASE("complexity score: range and argument validation") {
    FsmFeatures maxima{100, 10, 25};
    for (std::size_t s = 1; s <= 10; ++s)
        for (std::size_t e = 0; e <= 25; e += 5) {
            double v = complexity_score({50, s, e}, maxima);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    CHECK_THROWS_AS(complexity_score({1, 1, 1}, {0, 1, 1}), ContractError);
    CHECK_THROWS_AS(complexity_score({101, 1, 1}, maxima), ContractError);
}

TEST_CASE("classify: boundary values straight from the difficulty table") {
    CHECK(classify(0.14) == Difficulty::Easy);
    CHECK(classify(0.15) == Difficulty::Medium);
    CHECK(classify(0.30999) == Difficulty::Medium);
    CHECK(classify(0.31) == Difficulty::Hard);
    CHECK(classify(0.0) == Difficulty::Easy);
    CHECK(classify(1.0) == Difficulty::Hard);
    CHECK_THROWS_AS(classify(-0.01), ContractError);
    CHECK_THROWS_AS(classify(1.01), ContractError);
}

TEST_CASE("classify over score is monotone in each feature") {
    FsmFeatures maxima{100, 10, 25};
    auto rank = [&](const FsmFeatures& f) {
        return static_cast<int>(classify(complexity_score(f, maxima)));
    };
    for (std::size_t s = 1; s < 10; ++s)
        CHECK(rank({50, s + 1, 10}) >= rank({50, s, 10}));
    for (std::size_t e = 0; e < 25; ++e)
        CHECK(rank({50, 5, e + 1}) >= rank({50, 5, e}));
    for (std::size_t l = 0; l < 100; l += 10)
        CHECK(rank({l + 10, 5, 10}) >= rank({l, 5, 10}));
}

TEST_CASE("feature counting") {
    auto spec = toggle_spec();
    std::string forty_lines;
    for (int i = 0; i < 40; ++i) forty_lines += "// line\n";
    auto f = count_fsm_features(spec, forty_lines);
    CHECK(f.lines == 40);
    CHECK(f.states == 2);
    CHECK(f.transitions == 2);

    CHECK(count_fsm_features(spec, "").lines == 0);
    CHECK(count_fsm_features(spec, "no newline").lines == 1);
    CHECK(count_fsm_features(spec, "a\nb").lines == 2);
}

TEST_CASE("syntax error rate pooling") {
    // Problem A: 0 errors out of 3 iterations; problem B: 1 of 2 pooled
    // across two attempts. mean(0, 0.5) = 0.25.
    std::vector<std::vector<IterationCounts>> groups{
        {{3, 0}},
        {{1, 1}, {1, 0}},
    };
    CHECK(std::abs(syntax_error_rate(groups) - 0.25) <= 1e-12);

    std::vector<std::vector<IterationCounts>> clean{{{4, 0}}, {{2, 0}}};
    CHECK(syntax_error_rate(clean) == 0.0);

    std::vector<std::vector<IterationCounts>> all_bad{{{4, 4}}, {{2, 2}}};
    CHECK(syntax_error_rate(all_bad) == 1.0);

    CHECK_THROWS_AS(syntax_error_rate({}), ContractError);
    CHECK_THROWS_AS(syntax_error_rate({{}}), ContractError);
    CHECK_THROWS_AS(syntax_error_rate({{{0, 0}}}), ContractError);
}

TEST_CASE("run records round trip through JSON lines") {
    RunRecord rec;
    rec.problem_id = "p1";
    rec.attempt = 2;
    rec.verdict = RunVerdict::SyntaxError;
    rec.iterations = 5;
    rec.syntax_error_iterations = 3;
    rec.transcript = "t:abc";
    auto line = run_record_to_json(rec);
    auto back = run_record_from_json(line);
    REQUIRE(back.ok());
    CHECK(*back == rec);

    CHECK_FALSE(run_record_from_json("{").ok());
    CHECK_FALSE(run_record_from_json(R"({"problem":"p"})").ok());
    CHECK_FALSE(run_record_from_json(
                    R"({"problem":"p","attempt":0,"verdict":"pass","iterations":1,"syntax_error_iterations":2})")
                    .ok());
}

TEST_CASE("load_benchmark: fixture tree with one incomplete problem") {
    auto loaded = load_benchmark(test_helpers::fixture_path("benchload"));
    REQUIRE(loaded.problems.size() == 3);
    CHECK(loaded.problems[0].id == "p1");
    CHECK(loaded.problems[1].id == "p2");
    CHECK(loaded.problems[2].id == "p3");
    REQUIRE(loaded.diagnostics.size() == 1);
    CHECK(loaded.diagnostics[0].code == "E_INCOMPLETE");
    CHECK(loaded.diagnostics[0].path == "/broken");
    // p1 bundles an ir.json; the others do not.
    CHECK(loaded.problems[0].reference_ir.has_value());
    CHECK_FALSE(loaded.problems[1].reference_ir.has_value());
}

TEST_CASE("load_benchmark: empty root is fine, missing root is not") {
    auto empty_root = std::filesystem::temp_directory_path() / "fsmforge-empty-bench";
    std::filesystem::create_directories(empty_root);
    auto empty = load_benchmark(empty_root);
    CHECK(empty.problems.empty());
    CHECK(empty.diagnostics.empty());

    auto missing = load_benchmark(empty_root / "nope");
    CHECK(missing.problems.empty());
    REQUIRE(missing.diagnostics.size() == 1);
    CHECK(missing.diagnostics[0].code == "E_NO_ROOT");
}

TEST_CASE("make_report: pass@k expectation and difficulty breakdown") {
    std::vector<RunRecord> records;
    for (int p = 0; p < 10; ++p) {
        RunRecord rec;
        rec.problem_id = "p" + std::to_string(p);
        rec.attempt = 0;
        rec.verdict = p < 3 ? RunVerdict::Pass : RunVerdict::FunctionalFail;
        rec.iterations = 1;
        records.push_back(rec);
    }
    auto report = make_report(records, {1});
    REQUIRE(report.pass_at.size() == 1);
    CHECK(std::abs(report.pass_at[0].second - 0.3) <= 1e-12);

    std::map<std::string, Difficulty> classes;
    for (int p = 0; p < 10; ++p)
        classes["p" + std::to_string(p)] = p < 5 ? Difficulty::Easy : Difficulty::Hard;
    auto with_classes = make_report(records, {1}, classes);
    CHECK(with_classes.by_difficulty.at("easy").passed == 3);
    CHECK(with_classes.by_difficulty.at("easy").problems == 5);
    CHECK(with_classes.by_difficulty.at("hard").passed == 0);
}
