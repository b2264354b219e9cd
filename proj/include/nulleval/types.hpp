#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nulleval {

enum class Dataset {
    Aqua,
    Gsm8k,
    StrategyQa,
    WinoGrande,
    RaceMiddle,
    RaceHigh,
    Anli,
    TriviaQa,
};

inline constexpr Dataset kAllDatasets[] = {
    Dataset::Aqua,       Dataset::Gsm8k,    Dataset::StrategyQa, Dataset::WinoGrande,
    Dataset::RaceMiddle, Dataset::RaceHigh, Dataset::Anli,       Dataset::TriviaQa,
};

enum class AnswerType {
    MultipleChoice,
    BinaryChoice,
    Number,
    FreeText,
};

// The nine composition strategies; ZeroShot doubles as the bare task block
// (no phrase), which is also what the baseline uses.
enum class Technique {
    ZeroShot,
    NullShot,
    NullShotAfter,
    ZeroCot,
    NullCot,
    NullShotV1,
    NullShotV2,
    NullShotV3,
};

inline constexpr Technique kAllTechniques[] = {
    Technique::ZeroShot,   Technique::NullShot,   Technique::NullShotAfter,
    Technique::ZeroCot,    Technique::NullCot,    Technique::NullShotV1,
    Technique::NullShotV2, Technique::NullShotV3,
};

std::string_view dataset_name(Dataset d);
Dataset dataset_from_name(std::string_view name);
std::string_view technique_name(Technique t);
Technique technique_from_name(std::string_view name);
std::string_view answer_type_name(AnswerType t);
AnswerType answer_type_from_name(std::string_view name);

// Evaluation split and record count each adapter must reproduce.
std::string_view dataset_split(Dataset d);
std::size_t dataset_expected_count(Dataset d);
AnswerType dataset_answer_type(Dataset d);

// The gold answer of one record: exactly one of a choice label, a decimal
// rendered as text, or a non-empty alias list.
struct GoldAnswer {
    enum class Kind { Choice, Number, Text };

    Kind kind = Kind::Choice;
    std::string choice_label;           // Kind::Choice
    std::string number;                 // Kind::Number, decimal text
    std::vector<std::string> aliases;   // Kind::Text, trimmed and non-empty

    static GoldAnswer choice(std::string label);
    static GoldAnswer number_of(std::string decimal_text);
    static GoldAnswer text(std::vector<std::string> aliases);
};

// One normalized benchmark item. Records are immutable once loaded and safe
// to share across worker threads.
struct TaskRecord {
    std::string record_id;
    Dataset dataset = Dataset::Aqua;
    std::vector<std::pair<std::string, std::string>> context;   // (label, text)
    std::string question;
    std::vector<std::pair<std::string, std::string>> choices;   // (label, text)
    GoldAnswer gold;
    AnswerType answer_type = AnswerType::MultipleChoice;

    std::vector<std::string> choice_labels() const;
    // Throws SchemaError if any type invariant is violated.
    void validate() const;
};

}  // namespace nulleval
