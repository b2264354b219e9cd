#include "nulleval/compose.hpp"

#include "nulleval/errors.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

std::string format_task(const TaskRecord& record) {
    if (text::trim(record.question).empty()) {
        throw MalformedRecord("record " + record.record_id + " has an empty question");
    }
    const bool choice_typed = record.answer_type == AnswerType::MultipleChoice ||
                              record.answer_type == AnswerType::BinaryChoice;
    if (choice_typed && record.choices.empty()) {
        throw MissingChoices("record " + record.record_id + " is choice-typed but has no choices");
    }

    std::string out;
    for (const auto& [label, body] : record.context) {
        out += label;
        out += ": ";
        out += body;
        out += '\n';
    }
    out += "Question: ";
    out += record.question;
    out += '\n';
    if (!record.choices.empty()) {
        out += "Choices: ";
        bool first = true;
        for (const auto& [label, body] : record.choices) {
            if (!first) out += ", ";
            first = false;
            out += label;
            out += ") ";
            out += body;
        }
        out += '\n';
    }
    out += "Answer:";
    return out;
}

ComposedPrompt compose(const TaskRecord& record, Technique technique,
                       const PhraseLibrary& phrases) {
    const std::string block = format_task(record);
    const std::string& phrase = phrases.phrase(technique);

    ComposedPrompt prompt;
    prompt.technique = technique;
    prompt.record_id = record.record_id;
    prompt.template_hash = phrases.phrase_hash(technique);
    if (technique == Technique::ZeroShot) {
        prompt.text = block;
    } else if (phrase_after_task(technique)) {
        prompt.text = block + '\n' + phrase;
    } else {
        prompt.text = phrase + '\n' + block;
    }
    return prompt;
}

}  // namespace nulleval
