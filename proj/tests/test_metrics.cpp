#include <doctest.h>

#include <cmath>
#include <map>

#include "nulleval/errors.hpp"
#include "nulleval/metrics.hpp"
#include "testutil.hpp"

using namespace nulleval;

namespace {

CellResult cell(std::size_t n, std::size_t correct) {
    CellResult c;
    c.model = "m";
    c.dataset = Dataset::Gsm8k;
    c.n = n;
    c.correct = correct;
    return c;
}

CellResult empty_cell(std::size_t n, std::size_t empties) {
    CellResult c = cell(n, 0);
    c.empty = empties;
    return c;
}

// Pairs (baseline, treatment) of empty-response counts from the reference
// fixture, for one technique pair.
std::vector<std::pair<CellResult, CellResult>> fixture_pairs(const std::string& baseline,
                                                             const std::string& treatment) {
    std::map<std::string, std::size_t> sizes;
    for (const auto& row : testutil::read_csv(testutil::fixtures_dir() / "reference" /
                                              "dataset_sizes.csv")) {
        sizes[row[0]] = std::stoul(row[1]);
    }
    // key: model|dataset -> technique -> count
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    std::map<std::string, std::string> dataset_of;
    for (const auto& row : testutil::read_csv(testutil::fixtures_dir() / "reference" /
                                              "empty_response_counts.csv")) {
        const auto key = row[0] + "|" + row[1];
        counts[key][row[2]] = std::stoul(row[4]);
        dataset_of[key] = row[1];
    }
    std::vector<std::pair<CellResult, CellResult>> pairs;
    for (const auto& [key, by_tech] : counts) {
        const auto n = sizes.at(dataset_of.at(key));
        pairs.emplace_back(empty_cell(n, by_tech.at(baseline)),
                           empty_cell(n, by_tech.at(treatment)));
    }
    return pairs;
}

}  // namespace

TEST_CASE("accuracy in percent") {
    CHECK(format_percent2(accuracy_percent(cell(10, 0))) == "0.00");
    CHECK(format_percent2(accuracy_percent(cell(10, 10))) == "100.00");
    // 329 of 2000 is exactly 16.45%.
    CHECK(format_percent2(accuracy_percent(cell(2000, 329))) == "16.45");
    CHECK_THROWS_AS((void)accuracy_percent(cell(0, 0)), EmptyCell);
}

TEST_CASE("relative change") {
    CHECK(relative_change_percent(57.48, 57.48) == 0.0);
    CHECK(format_percent2(relative_change_percent(57.48, 42.91)) == "33.96");
    CHECK(std::abs(relative_change_percent(57.48, 42.91) - 33.94) <= 0.1);
    CHECK(format_percent2(relative_change_percent(16.45, 14.78)) == "11.30");
    CHECK(std::abs(relative_change_percent(16.45, 14.78) - 11.28) <= 0.1);
    CHECK_THROWS_AS((void)relative_change_percent(1.0, 0.0), ZeroBaseline);
}

TEST_CASE("relative change sign law") {
    const double pairs[][2] = {{10, 5}, {5, 10}, {3.3, 3.3}, {0.0, 4.0}, {99.9, 0.1}};
    for (const auto& p : pairs) {
        const double rc = relative_change_percent(p[0], p[1]);
        if (p[0] > p[1]) CHECK(rc > 0);
        if (p[0] < p[1]) CHECK(rc < 0);
        if (p[0] == p[1]) CHECK(rc == 0.0);
    }
}

TEST_CASE("refusal detection on the published openings") {
    CHECK(detect_refusal("I'm sorry, but as an AI, I don't have access to external content.",
                         "gpt"));
    CHECK(detect_refusal(
        "The provided context does not contain any information about Metallica.", "gemini"));
    CHECK(detect_refusal("The context does not mention anything about actors.", "gemini"));
    CHECK_FALSE(detect_refusal("The answer is B.", "gpt"));
    CHECK_FALSE(detect_refusal("The answer is B.", "gemini"));

    // Prefix patterns anchor to the start of the response.
    CHECK_FALSE(detect_refusal("Well, I'm sorry, but that is wrong.", "gpt"));
    CHECK(detect_refusal("  \nI'm sorry, but no.", "gpt"));

    // Patterns are family-scoped.
    CHECK_FALSE(detect_refusal("I'm sorry, but no.", "gemini"));
    CHECK_FALSE(detect_refusal("The provided context does not contain it.", "gpt"));
    CHECK_FALSE(detect_refusal("anything", "palm"));

    // The Contains patterns need context/provided on the same line.
    CHECK_FALSE(detect_refusal("this does not contain numbers", "gemini"));
}

TEST_CASE("refusal detection over the transcribed figures") {
    std::size_t refusals = 0;
    for (const auto& figure : testutil::load_figure_cases()) {
        CAPTURE(figure.name);
        if (figure.expect_refusal) {
            CHECK(detect_refusal(figure.response, figure.model_family));
            ++refusals;
        } else {
            // No false positives under either family's patterns.
            CHECK_FALSE(detect_refusal(figure.response, "gpt"));
            CHECK_FALSE(detect_refusal(figure.response, "gemini"));
        }
    }
    CHECK(refusals == 5);
}

TEST_CASE("ratios render to the published two-decimal percents") {
    CHECK(format_percent2(refusal_ratio_percent(1234, 2290)) == "53.89");
    CHECK(format_percent2(refusal_ratio_percent(260, 1267)) == "20.52");
    CHECK(format_percent2(refusal_ratio_percent(79, 1000)) == "7.90");
    CHECK(format_percent2(refusal_ratio_percent(0, 77)) == "0.00");
    CHECK(format_percent2(empty_ratio_percent(empty_cell(2290, 364))) == "15.90");
    CHECK(format_percent2(empty_ratio_percent(empty_cell(2290, 75))) == "3.28");
    CHECK_THROWS_AS((void)refusal_ratio_percent(1, 0), EmptyCell);
}

TEST_CASE("empty-response reduction summary basics") {
    std::vector<std::pair<CellResult, CellResult>> pairs;
    pairs.emplace_back(empty_cell(1000, 100), empty_cell(1000, 50));
    auto summary = empty_reduction_summary(pairs);
    CHECK(format_percent2(summary.mean_percent) == "50.00");
    CHECK(summary.pairs_used == 1);

    pairs.clear();
    pairs.emplace_back(empty_cell(1000, 40), empty_cell(1000, 40));
    pairs.emplace_back(empty_cell(1000, 7), empty_cell(1000, 7));
    summary = empty_reduction_summary(pairs);
    CHECK(format_percent2(summary.mean_percent) == "0.00");

    CHECK_THROWS_AS((void)empty_reduction_summary({}), NoPairs);
}

TEST_CASE("reduction semantics over the transcribed empty-response table") {
    const auto ns_pairs = fixture_pairs("zero_shot", "null_shot");
    const auto ncot_pairs = fixture_pairs("zero_cot", "null_cot");
    REQUIRE(ns_pairs.size() == 32);
    REQUIRE(ncot_pairs.size() == 32);

    // Counting zero-baseline pairs as zero reduction reproduces the
    // published 44.77 / 5.26 / 25.02 averages.
    const auto ns = empty_reduction_summary(ns_pairs, ReductionPopulation::AllPairs,
                                            ZeroBaselinePolicy::CountAsZero);
    const auto ncot = empty_reduction_summary(ncot_pairs, ReductionPopulation::AllPairs,
                                              ZeroBaselinePolicy::CountAsZero);
    CHECK(format_percent2(ns.mean_percent) == "44.77");
    CHECK(format_percent2(ncot.mean_percent) == "5.26");
    CHECK(ns.pairs_used == 32);
    CHECK(ncot.pairs_used == 32);
    CHECK(format_percent2((ns.mean_percent + ncot.mean_percent) / 2) == "25.02");

    // Excluding zero-baseline pairs shifts only the null-cot figure.
    const auto ncot_excl = empty_reduction_summary(ncot_pairs, ReductionPopulation::AllPairs,
                                                   ZeroBaselinePolicy::Exclude);
    CHECK(ncot_excl.pairs_used == 29);
    CHECK(ncot_excl.pairs_excluded == 3);
    CHECK(format_percent2(ncot_excl.mean_percent) == "5.81");

    // Decreased-only population, for comparison.
    const auto ns_dec = empty_reduction_summary(ns_pairs, ReductionPopulation::DecreasedOnly,
                                                ZeroBaselinePolicy::Exclude);
    const auto ncot_dec = empty_reduction_summary(ncot_pairs, ReductionPopulation::DecreasedOnly,
                                                  ZeroBaselinePolicy::Exclude);
    CHECK(ns_dec.pairs_used == 28);
    CHECK(ncot_dec.pairs_used == 23);
    CHECK(format_percent2(ns_dec.mean_percent) == "53.42");
    CHECK(format_percent2(ncot_dec.mean_percent) == "27.66");
}

TEST_CASE("hallucination degree") {
    std::map<Technique, CellResult> results;
    results[Technique::ZeroShot] = cell(10000, 2559);  // 25.59%
    results[Technique::NullShot] = cell(10000, 3701);  // 37.01%
    const double degree = hallucination_degree(results, Technique::ZeroShot);
    CHECK(std::abs(degree - 44.62) <= 0.1);

    results[Technique::ZeroShot] = cell(10000, 7348);  // 73.48%
    results[Technique::NullShot] = cell(10000, 5580);  // 55.80%
    CHECK(format_percent2(hallucination_degree(results, Technique::ZeroShot)) == "-24.06");

    results[Technique::NullShot] = results[Technique::ZeroShot];
    CHECK(hallucination_degree(results, Technique::ZeroShot) == 0.0);

    results.erase(Technique::NullShot);
    CHECK_THROWS_AS((void)hallucination_degree(results, Technique::ZeroShot), MissingTechnique);
    std::map<Technique, CellResult> no_baseline;
    no_baseline[Technique::NullShot] = cell(10, 5);
    CHECK_THROWS_AS((void)hallucination_degree(no_baseline, Technique::ZeroShot),
                    MissingTechnique);
}

TEST_CASE("degree ordering is invariant under accuracy rescaling") {
    // Relative change is scale-invariant, so multiplying every accuracy by a
    // constant must leave each degree value unchanged.
    const std::size_t n = 10000;
    const std::pair<std::size_t, std::size_t> cells_raw[] = {
        {2559, 3701}, {7348, 5580}, {5489, 6323}, {8100, 8200}};
    for (const auto& [base, treat] : cells_raw) {
        std::map<Technique, CellResult> full;
        full[Technique::ZeroShot] = cell(n, base);
        full[Technique::NullShot] = cell(n, treat);
        std::map<Technique, CellResult> halved;
        halved[Technique::ZeroShot] = cell(n * 2, base);
        halved[Technique::NullShot] = cell(n * 2, treat);
        CHECK(hallucination_degree(full, Technique::ZeroShot) ==
              doctest::Approx(hallucination_degree(halved, Technique::ZeroShot)).epsilon(1e-12));
    }
}

TEST_CASE("display rounding is half away from zero") {
    // Dyadic fractions sit exactly on the .xx5 boundary in binary.
    CHECK(format_percent2(0.125) == "0.13");
    CHECK(format_percent2(-0.125) == "-0.13");
    CHECK(format_percent2(2.375) == "2.38");
    CHECK(format_percent2(0.0) == "0.00");
    CHECK(format_percent2(-0.0001) == "0.00");
    CHECK(round_half_up2(0.625) == doctest::Approx(0.63));
    CHECK(round_half_up2(-0.625) == doctest::Approx(-0.63));
}
