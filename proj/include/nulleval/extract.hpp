#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nulleval/types.hpp"

namespace nulleval {

enum class ExtractRule {
    SoleUppercase,   // whole trimmed response is a single valid label
    LabelParen,      // "A)" style match
    AnswerIsPhrase,  // "answer is" / "answer:" followed by a label
    FirstNumber,     // first numeric token on the line
    AliasContain,    // lowercase alias containment
    None,
};

enum class LineUsed { Last, First, Whole, None };

std::string_view extract_rule_name(ExtractRule r);
ExtractRule extract_rule_from_name(std::string_view name);
std::string_view line_used_name(LineUsed l);
LineUsed line_used_from_name(std::string_view name);

// Result of parsing one raw response. `value` holds the choice label, the
// numeric token (commas/currency stripped, sign kept), or the matched alias
// as listed. `answer is NoAnswer iff rule == None`.
struct ExtractionOutcome {
    enum class Kind { Choice, Number, Alias, NoAnswer };

    Kind kind = Kind::NoAnswer;
    std::string value;
    ExtractRule rule = ExtractRule::None;
    LineUsed line = LineUsed::Last;

    bool has_answer() const { return kind != Kind::NoAnswer; }

    static ExtractionOutcome none() {
        ExtractionOutcome o;
        o.line = LineUsed::None;
        return o;
    }
};

// Choice extraction, in fixed rule order:
//   1. the whole trimmed response is a single valid label character;
//   2. per line (last non-empty first, then first non-empty):
//      a. leftmost "<label>)" occurrence,
//      b. "answer is" / "answer:" (case-insensitive) followed by the first
//         valid label character.
// Markdown bold markers ("**") are stripped before matching. Labels are
// single characters (letters, or digits for the numbered-choice datasets).
// Never throws on response content; failures return NoAnswer.
ExtractionOutcome extract_choice(std::string_view response,
                                 const std::vector<std::string>& valid_labels);

// First numeric token on the last non-empty line, then the first non-empty
// line. A token is an optional sign and/or leading '$', digits with ','
// thousands separators (stripped), and an optional fraction. A trailing
// '.' or '%' is not part of the token. Scientific notation is not parsed.
ExtractionOutcome extract_number(std::string_view response);

// First alias (in list order) contained in the response after lowercasing
// both sides. Doubles as the correctness check for free-text records.
ExtractionOutcome extract_freetext(std::string_view response,
                                   const std::vector<std::string>& aliases);

// Dispatches on the record's answer type.
ExtractionOutcome extract_answer(std::string_view response, const TaskRecord& record);

// Canonical decimal form used for numeric comparison: sign normalized,
// leading zeros dropped, trailing fractional zeros and a bare '.' removed
// (so "272.0" compares equal to "272").
std::string canonical_decimal(std::string_view token);

// True when the outcome answers the gold correctly; NoAnswer is always
// false. Throws TypeMismatch when the outcome kind cannot be compared
// against the gold kind.
bool score(const ExtractionOutcome& outcome, const GoldAnswer& gold);

}  // namespace nulleval
