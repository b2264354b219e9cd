#include "nulleval/extract.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "nulleval/errors.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

namespace {

bool is_valid_label_char(char c, const std::vector<std::string>& labels) {
    for (const auto& label : labels) {
        if (label.size() == 1 && label[0] == c) return true;
    }
    return false;
}

// Non-empty lines of the response in (last, first) priority order; when the
// response has a single non-empty line the two coincide and it is tried once.
std::vector<std::pair<std::string_view, LineUsed>> candidate_lines(std::string_view response) {
    std::vector<std::string_view> nonempty;
    for (auto line : text::split_lines(response)) {
        const auto t = text::trim(line);
        if (!t.empty()) nonempty.push_back(t);
    }
    std::vector<std::pair<std::string_view, LineUsed>> out;
    if (nonempty.empty()) return out;
    out.emplace_back(nonempty.back(), LineUsed::Last);
    if (nonempty.size() > 1) out.emplace_back(nonempty.front(), LineUsed::First);
    return out;
}

// Leftmost "<label>)" occurrence on the line.
bool find_label_paren(std::string_view line, const std::vector<std::string>& labels,
                      char& out_label) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        if (line[i + 1] == ')' && is_valid_label_char(line[i], labels)) {
            out_label = line[i];
            return true;
        }
    }
    return false;
}

// Earliest case-insensitive "answer is" or "answer:" on the line, then the
// first valid label character after it.
bool find_answer_is(std::string_view line, const std::vector<std::string>& labels,
                    char& out_label) {
    const std::string lower = text::to_lower_ascii(line);
    auto pos = std::string::npos;
    std::size_t skip = 0;
    for (std::string_view phrase : {std::string_view("answer is"), std::string_view("answer:")}) {
        const auto p = lower.find(phrase);
        if (p != std::string::npos && (pos == std::string::npos || p < pos)) {
            pos = p;
            skip = phrase.size();
        }
    }
    if (pos == std::string::npos) return false;
    for (std::size_t i = pos + skip; i < line.size(); ++i) {
        if (is_valid_label_char(line[i], labels)) {
            out_label = line[i];
            return true;
        }
    }
    return false;
}

struct NumberToken {
    std::string value;
    bool found = false;
};

// Scans a line for the first numeric token. Grammar: optional sign
// (immediately before a digit or a '$' followed by a digit), optional '$',
// digits with ',' separators that must be followed by a digit, and one '.'
// fraction whose dot must also be followed by a digit. Commas and currency
// are stripped from the returned token, the sign is kept.
NumberToken scan_first_number(std::string_view line) {
    const auto n = line.size();
    auto digit = [&](std::size_t i) {
        return i < n && line[i] >= '0' && line[i] <= '9';
    };
    for (std::size_t i = 0; i < n; ++i) {
        const char c = line[i];
        std::size_t start = i;
        bool negative = false;
        if (c == '+' || c == '-') {
            std::size_t j = i + 1;
            if (j < n && line[j] == '$') ++j;
            if (!digit(j)) continue;
            negative = (c == '-');
            start = j;
        } else if (c == '$') {
            if (!digit(i + 1)) continue;
            start = i + 1;
        } else if (c >= '0' && c <= '9') {
            start = i;
        } else {
            continue;
        }

        NumberToken token;
        token.found = true;
        if (negative) token.value += '-';
        std::size_t j = start;
        while (j < n) {
            if (line[j] >= '0' && line[j] <= '9') {
                token.value += line[j];
                ++j;
            } else if (line[j] == ',' && digit(j + 1)) {
                ++j;  // thousands separator
            } else {
                break;
            }
        }
        if (j < n && line[j] == '.' && digit(j + 1)) {
            token.value += '.';
            ++j;
            while (digit(j)) {
                token.value += line[j];
                ++j;
            }
        }
        return token;
    }
    return {};
}

}  // namespace

std::string_view extract_rule_name(ExtractRule r) {
    switch (r) {
        case ExtractRule::SoleUppercase: return "sole_uppercase";
        case ExtractRule::LabelParen: return "label_paren";
        case ExtractRule::AnswerIsPhrase: return "answer_is_phrase";
        case ExtractRule::FirstNumber: return "first_number";
        case ExtractRule::AliasContain: return "alias_contain";
        case ExtractRule::None: return "none";
    }
    return "none";
}

ExtractRule extract_rule_from_name(std::string_view name) {
    for (ExtractRule r : {ExtractRule::SoleUppercase, ExtractRule::LabelParen,
                          ExtractRule::AnswerIsPhrase, ExtractRule::FirstNumber,
                          ExtractRule::AliasContain, ExtractRule::None}) {
        if (extract_rule_name(r) == name) return r;
    }
    throw ConfigError("unknown extraction rule: " + std::string(name));
}

std::string_view line_used_name(LineUsed l) {
    switch (l) {
        case LineUsed::Last: return "last";
        case LineUsed::First: return "first";
        case LineUsed::Whole: return "whole";
        case LineUsed::None: return "none";
    }
    return "none";
}

LineUsed line_used_from_name(std::string_view name) {
    for (LineUsed l : {LineUsed::Last, LineUsed::First, LineUsed::Whole, LineUsed::None}) {
        if (line_used_name(l) == name) return l;
    }
    throw ConfigError("unknown line marker: " + std::string(name));
}

ExtractionOutcome extract_choice(std::string_view response,
                                 const std::vector<std::string>& valid_labels) {
    if (valid_labels.empty()) throw std::invalid_argument("extract_choice: no valid labels");
    for (const auto& label : valid_labels) {
        if (label.size() != 1) {
            throw std::invalid_argument("extract_choice: labels must be single characters");
        }
    }

    // Strip markdown bold markers; chat models wrap answers in them.
    const std::string cleaned = text::remove_all(response, "**");

    const auto whole = text::trim(cleaned);
    if (whole.size() == 1 && is_valid_label_char(whole[0], valid_labels)) {
        ExtractionOutcome o;
        o.kind = ExtractionOutcome::Kind::Choice;
        o.value = std::string(whole);
        o.rule = ExtractRule::SoleUppercase;
        o.line = LineUsed::Whole;
        return o;
    }

    for (const auto& [line, which] : candidate_lines(cleaned)) {
        char label = 0;
        if (find_label_paren(line, valid_labels, label)) {
            ExtractionOutcome o;
            o.kind = ExtractionOutcome::Kind::Choice;
            o.value = std::string(1, label);
            o.rule = ExtractRule::LabelParen;
            o.line = which;
            return o;
        }
        if (find_answer_is(line, valid_labels, label)) {
            ExtractionOutcome o;
            o.kind = ExtractionOutcome::Kind::Choice;
            o.value = std::string(1, label);
            o.rule = ExtractRule::AnswerIsPhrase;
            o.line = which;
            return o;
        }
    }
    return ExtractionOutcome::none();
}

ExtractionOutcome extract_number(std::string_view response) {
    for (const auto& [line, which] : candidate_lines(response)) {
        const auto token = scan_first_number(line);
        if (token.found) {
            ExtractionOutcome o;
            o.kind = ExtractionOutcome::Kind::Number;
            o.value = token.value;
            o.rule = ExtractRule::FirstNumber;
            o.line = which;
            return o;
        }
    }
    return ExtractionOutcome::none();
}

ExtractionOutcome extract_freetext(std::string_view response,
                                   const std::vector<std::string>& aliases) {
    if (aliases.empty()) throw std::invalid_argument("extract_freetext: no aliases");
    const std::string lower_response = text::to_lower_ascii(response);
    for (const auto& alias : aliases) {
        const std::string lower_alias = text::to_lower_ascii(alias);
        if (lower_alias.empty()) continue;
        if (lower_response.find(lower_alias) != std::string::npos) {
            ExtractionOutcome o;
            o.kind = ExtractionOutcome::Kind::Alias;
            o.value = alias;
            o.rule = ExtractRule::AliasContain;
            o.line = LineUsed::Whole;
            return o;
        }
    }
    return ExtractionOutcome::none();
}

ExtractionOutcome extract_answer(std::string_view response, const TaskRecord& record) {
    switch (record.answer_type) {
        case AnswerType::MultipleChoice:
        case AnswerType::BinaryChoice:
            return extract_choice(response, record.choice_labels());
        case AnswerType::Number:
            return extract_number(response);
        case AnswerType::FreeText:
            return extract_freetext(response, record.gold.aliases);
    }
    return ExtractionOutcome::none();
}

std::string canonical_decimal(std::string_view token) {
    auto t = text::trim(token);
    bool negative = false;
    if (!t.empty() && (t.front() == '+' || t.front() == '-')) {
        negative = t.front() == '-';
        t.remove_prefix(1);
    }
    std::string digits(t);
    std::string integral = digits;
    std::string fraction;
    if (const auto dot = digits.find('.'); dot != std::string::npos) {
        integral = digits.substr(0, dot);
        fraction = digits.substr(dot + 1);
    }
    while (integral.size() > 1 && integral.front() == '0') integral.erase(integral.begin());
    if (integral.empty()) integral = "0";
    while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();

    std::string out;
    if (negative && !(integral == "0" && fraction.empty())) out += '-';
    out += integral;
    if (!fraction.empty()) {
        out += '.';
        out += fraction;
    }
    return out;
}

bool score(const ExtractionOutcome& outcome, const GoldAnswer& gold) {
    if (!outcome.has_answer()) return false;
    switch (gold.kind) {
        case GoldAnswer::Kind::Choice:
            if (outcome.kind != ExtractionOutcome::Kind::Choice) {
                throw TypeMismatch("choice gold scored against a non-choice outcome");
            }
            return outcome.value == gold.choice_label;
        case GoldAnswer::Kind::Number:
            if (outcome.kind != ExtractionOutcome::Kind::Number) {
                throw TypeMismatch("numeric gold scored against a non-numeric outcome");
            }
            return canonical_decimal(outcome.value) == canonical_decimal(gold.number);
        case GoldAnswer::Kind::Text:
            if (outcome.kind != ExtractionOutcome::Kind::Alias) {
                throw TypeMismatch("free-text gold scored against a non-alias outcome");
            }
            return true;  // extract_freetext only matches gold aliases
    }
    return false;
}

}  // namespace nulleval
