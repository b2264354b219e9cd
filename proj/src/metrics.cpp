#include "nulleval/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "nulleval/errors.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

double accuracy_percent(const CellResult& cell) {
    if (cell.n == 0) throw EmptyCell("cell " + cell.model + "/" +
                                     std::string(dataset_name(cell.dataset)) + " has n == 0");
    return 100.0 * static_cast<double>(cell.correct) / static_cast<double>(cell.n);
}

double relative_change_percent(double treatment, double baseline) {
    if (baseline <= 0.0) {
        throw ZeroBaseline("relative change undefined for baseline " + std::to_string(baseline));
    }
    return 100.0 * (treatment - baseline) / baseline;
}

const RefusalPatternSet& RefusalPatternSet::defaults() {
    static const RefusalPatternSet set{{
        {"gpt", RefusalPattern::Match::Prefix, "I'm sorry, but", {}},
        {"gemini", RefusalPattern::Match::Contains, "does not contain", {"context", "provided"}},
        {"gemini", RefusalPattern::Match::Contains, "does not mention", {"context", "provided"}},
    }};
    return set;
}

bool detect_refusal(std::string_view response, std::string_view model_family,
                    const RefusalPatternSet& patterns) {
    for (const auto& pattern : patterns.patterns) {
        if (pattern.family != model_family) continue;
        if (pattern.match == RefusalPattern::Match::Prefix) {
            if (text::trim(response).substr(0, pattern.needle.size()) == pattern.needle) {
                return true;
            }
            continue;
        }
        for (auto line : text::split_lines(response)) {
            if (line.find(pattern.needle) == std::string_view::npos) continue;
            if (pattern.same_line_any.empty()) return true;
            for (const auto& word : pattern.same_line_any) {
                if (line.find(word) != std::string_view::npos) return true;
            }
        }
    }
    return false;
}

double refusal_ratio_percent(std::size_t count, std::size_t n) {
    if (n == 0) throw EmptyCell("ratio undefined for n == 0");
    return 100.0 * static_cast<double>(count) / static_cast<double>(n);
}

double empty_ratio_percent(const CellResult& cell) {
    return refusal_ratio_percent(cell.empty, cell.n);
}

ReductionSummary empty_reduction_summary(
    const std::vector<std::pair<CellResult, CellResult>>& baseline_treatment_pairs,
    ReductionPopulation population, ZeroBaselinePolicy zero_policy) {
    double sum = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    for (const auto& [baseline, treatment] : baseline_treatment_pairs) {
        if (baseline.empty == 0) {
            if (zero_policy == ZeroBaselinePolicy::CountAsZero &&
                population == ReductionPopulation::AllPairs) {
                ++used;  // contributes zero reduction
            } else {
                ++excluded;
            }
            continue;
        }
        const double reduction = 100.0 *
                                 (static_cast<double>(baseline.empty) -
                                  static_cast<double>(treatment.empty)) /
                                 static_cast<double>(baseline.empty);
        if (population == ReductionPopulation::DecreasedOnly && reduction <= 0.0) continue;
        sum += reduction;
        ++used;
    }
    if (used == 0) throw NoPairs("no pairs left to average");
    return ReductionSummary{sum / static_cast<double>(used), used, excluded};
}

double hallucination_degree(const std::map<Technique, CellResult>& results_by_technique,
                            Technique baseline) {
    const auto treatment_it = results_by_technique.find(Technique::NullShot);
    if (treatment_it == results_by_technique.end()) {
        throw MissingTechnique("null_shot cell missing from results");
    }
    const auto baseline_it = results_by_technique.find(baseline);
    if (baseline_it == results_by_technique.end()) {
        throw MissingTechnique("baseline technique cell missing from results");
    }
    return relative_change_percent(accuracy_percent(treatment_it->second),
                                   accuracy_percent(baseline_it->second));
}

double round_half_up2(double value) {
    const double scaled = std::abs(value) * 100.0;
    const double rounded = std::floor(scaled + 0.5) / 100.0;
    return value < 0 ? -rounded : rounded;
}

std::string format_percent2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", round_half_up2(value));
    std::string out(buf);
    if (out == "-0.00") out = "0.00";
    return out;
}

}  // namespace nulleval
