#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nulleval/types.hpp"

namespace nulleval {

// Aggregated outcome of one (model, dataset, technique) cell.
struct CellResult {
    std::string model;
    Dataset dataset = Dataset::Aqua;
    Technique technique = Technique::ZeroShot;
    std::size_t n = 0;
    std::size_t correct = 0;
    std::size_t no_answer = 0;
    std::size_t empty = 0;
    std::size_t refusals = 0;
};

// Accuracy in percent (100 * correct / n). Throws EmptyCell when n == 0.
double accuracy_percent(const CellResult& cell);

// 100 * (treatment - baseline) / baseline. Throws ZeroBaseline when the
// baseline is not positive; report rendering shows those cells as "—".
double relative_change_percent(double treatment, double baseline);

struct RefusalPattern {
    std::string family;  // model family the pattern applies to
    enum class Match { Prefix, Contains } match = Match::Prefix;
    std::string needle;  // case-sensitive
    // For Contains patterns: at least one of these must share the matched
    // line (empty list = no co-occurrence constraint).
    std::vector<std::string> same_line_any;
};

struct RefusalPatternSet {
    std::vector<RefusalPattern> patterns;
    // Built-in patterns: GPT-family responses opening with "I'm sorry, but";
    // Gemini-family lines saying the context "does not contain" /
    // "does not mention" the needed information.
    static const RefusalPatternSet& defaults();
};

// True iff any pattern registered for the model family matches. Prefix
// patterns test the start of the response after leading whitespace;
// Contains patterns test each line.
bool detect_refusal(std::string_view response, std::string_view model_family,
                    const RefusalPatternSet& patterns = RefusalPatternSet::defaults());

// 100 * count / n. Throws EmptyCell when n == 0.
double refusal_ratio_percent(std::size_t count, std::size_t n);
double empty_ratio_percent(const CellResult& cell);

enum class ReductionPopulation { AllPairs, DecreasedOnly };
enum class ZeroBaselinePolicy { Exclude, CountAsZero };

struct ReductionSummary {
    double mean_percent = 0.0;
    std::size_t pairs_used = 0;      // pairs contributing to the denominator
    std::size_t pairs_excluded = 0;  // zero-baseline pairs left out
};

// Mean per-pair relative decrease in empty responses,
// 100 * (baseline_empty - treatment_empty) / baseline_empty, over paired
// cells sharing model and dataset. Pairs whose baseline has no empties are
// either excluded or counted as zero reduction, per policy; DecreasedOnly
// restricts the population to pairs that actually decreased. Throws NoPairs
// when nothing is left to average.
ReductionSummary empty_reduction_summary(
    const std::vector<std::pair<CellResult, CellResult>>& baseline_treatment_pairs,
    ReductionPopulation population = ReductionPopulation::AllPairs,
    ZeroBaselinePolicy zero_policy = ZeroBaselinePolicy::CountAsZero);

// Per-(model, dataset) hallucination-degree score: the relative accuracy
// change of the null-shot cell over the baseline cell. Reports keep the
// per-dataset vector; there is deliberately no scalar collapse per model.
// Throws MissingTechnique when either cell is absent.
double hallucination_degree(const std::map<Technique, CellResult>& results_by_technique,
                            Technique baseline);

// Display rounding: half away from zero at two decimals.
double round_half_up2(double value);
// "53.89", "-24.06", "0.00"; used by tables and CSV display columns.
std::string format_percent2(double value);

}  // namespace nulleval
