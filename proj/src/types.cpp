#include "nulleval/types.hpp"

#include <algorithm>

#include "nulleval/errors.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

namespace {

struct DatasetInfo {
    Dataset dataset;
    std::string_view name;
    std::string_view split;
    std::size_t count;
    AnswerType answer_type;
};

constexpr DatasetInfo kDatasetTable[] = {
    {Dataset::Aqua, "aqua", "test", 254, AnswerType::MultipleChoice},
    {Dataset::Gsm8k, "gsm8k", "test", 1319, AnswerType::Number},
    {Dataset::StrategyQa, "strategyqa", "test", 2290, AnswerType::BinaryChoice},
    {Dataset::WinoGrande, "winogrande", "dev", 1267, AnswerType::BinaryChoice},
    {Dataset::RaceMiddle, "race_m", "middle-test", 1436, AnswerType::MultipleChoice},
    {Dataset::RaceHigh, "race_h", "high-test", 3498, AnswerType::MultipleChoice},
    {Dataset::Anli, "anli", "R3-test", 1200, AnswerType::MultipleChoice},
    {Dataset::TriviaQa, "triviaqa", "Wikipedia", 1000, AnswerType::FreeText},
};

const DatasetInfo& info(Dataset d) {
    for (const auto& entry : kDatasetTable) {
        if (entry.dataset == d) return entry;
    }
    throw ConfigError("unknown dataset enum value");
}

constexpr std::pair<Technique, std::string_view> kTechniqueNames[] = {
    {Technique::ZeroShot, "zero_shot"},
    {Technique::NullShot, "null_shot"},
    {Technique::NullShotAfter, "null_shot_after"},
    {Technique::ZeroCot, "zero_cot"},
    {Technique::NullCot, "null_cot"},
    {Technique::NullShotV1, "null_shot_v1"},
    {Technique::NullShotV2, "null_shot_v2"},
    {Technique::NullShotV3, "null_shot_v3"},
};

constexpr std::pair<AnswerType, std::string_view> kAnswerTypeNames[] = {
    {AnswerType::MultipleChoice, "multiple_choice"},
    {AnswerType::BinaryChoice, "binary_choice"},
    {AnswerType::Number, "number"},
    {AnswerType::FreeText, "free_text"},
};

}  // namespace

std::string_view dataset_name(Dataset d) { return info(d).name; }

Dataset dataset_from_name(std::string_view name) {
    for (const auto& entry : kDatasetTable) {
        if (entry.name == name) return entry.dataset;
    }
    throw ConfigError("unknown dataset name: " + std::string(name));
}

std::string_view technique_name(Technique t) {
    for (const auto& [tech, name] : kTechniqueNames) {
        if (tech == t) return name;
    }
    throw ConfigError("unknown technique enum value");
}

Technique technique_from_name(std::string_view name) {
    for (const auto& [tech, tname] : kTechniqueNames) {
        if (tname == name) return tech;
    }
    throw ConfigError("unknown technique name: " + std::string(name));
}

std::string_view answer_type_name(AnswerType t) {
    for (const auto& [at, name] : kAnswerTypeNames) {
        if (at == t) return name;
    }
    throw ConfigError("unknown answer type enum value");
}

AnswerType answer_type_from_name(std::string_view name) {
    for (const auto& [at, tname] : kAnswerTypeNames) {
        if (tname == name) return at;
    }
    throw ConfigError("unknown answer type name: " + std::string(name));
}

std::string_view dataset_split(Dataset d) { return info(d).split; }
std::size_t dataset_expected_count(Dataset d) { return info(d).count; }
AnswerType dataset_answer_type(Dataset d) { return info(d).answer_type; }

GoldAnswer GoldAnswer::choice(std::string label) {
    GoldAnswer g;
    g.kind = Kind::Choice;
    g.choice_label = std::move(label);
    return g;
}

GoldAnswer GoldAnswer::number_of(std::string decimal_text) {
    GoldAnswer g;
    g.kind = Kind::Number;
    g.number = std::move(decimal_text);
    return g;
}

GoldAnswer GoldAnswer::text(std::vector<std::string> aliases) {
    GoldAnswer g;
    g.kind = Kind::Text;
    g.aliases = std::move(aliases);
    return g;
}

std::vector<std::string> TaskRecord::choice_labels() const {
    std::vector<std::string> labels;
    labels.reserve(choices.size());
    for (const auto& [label, _] : choices) labels.push_back(label);
    return labels;
}

void TaskRecord::validate() const {
    if (record_id.empty()) throw SchemaError("record has empty record_id");
    if (text::trim(question).empty()) {
        throw SchemaError("record " + record_id + " has empty question");
    }
    const bool choice_typed =
        answer_type == AnswerType::MultipleChoice || answer_type == AnswerType::BinaryChoice;
    if (choice_typed && choices.empty()) {
        throw SchemaError("record " + record_id + " is choice-typed but has no choices");
    }
    if (!choice_typed && !choices.empty()) {
        throw SchemaError("record " + record_id + " carries choices but is not choice-typed");
    }
    if (answer_type == AnswerType::BinaryChoice && choices.size() != 2) {
        throw SchemaError("record " + record_id + " must have exactly two choices");
    }
    if (answer_type != dataset_answer_type(dataset)) {
        throw SchemaError("record " + record_id + " answer type disagrees with its dataset");
    }
    switch (gold.kind) {
        case GoldAnswer::Kind::Choice: {
            if (!choice_typed) {
                throw SchemaError("record " + record_id + " has a choice gold without choices");
            }
            const auto labels = choice_labels();
            if (std::find(labels.begin(), labels.end(), gold.choice_label) == labels.end()) {
                throw SchemaError("record " + record_id + " gold label '" + gold.choice_label +
                                  "' is not among its choice labels");
            }
            break;
        }
        case GoldAnswer::Kind::Number:
            if (answer_type != AnswerType::Number) {
                throw SchemaError("record " + record_id + " has a numeric gold but is not numeric");
            }
            if (text::trim(gold.number).empty()) {
                throw SchemaError("record " + record_id + " has an empty numeric gold");
            }
            break;
        case GoldAnswer::Kind::Text:
            if (answer_type != AnswerType::FreeText) {
                throw SchemaError("record " + record_id + " has alias gold but is not free-text");
            }
            if (gold.aliases.empty()) {
                throw SchemaError("record " + record_id + " has no gold aliases");
            }
            for (const auto& alias : gold.aliases) {
                if (text::trim(alias).empty()) {
                    throw SchemaError("record " + record_id + " has a blank gold alias");
                }
            }
            break;
    }
}

}  // namespace nulleval
