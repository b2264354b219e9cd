#pragma once

#include <string>

#include "nulleval/phrases.hpp"
#include "nulleval/types.hpp"

namespace nulleval {

struct ComposedPrompt {
    std::string text;
    Technique technique = Technique::ZeroShot;
    std::string record_id;
    std::string template_hash;
};

// Renders the standardized task block:
//
//   <context label>: <context text>     (zero or more lines)
//   Question: <question>
//   Choices: A) ..., B) ...             (only for choice-typed records)
//   Answer:
//
// Dataset text passes through verbatim; no trimming or re-wrapping.
// Throws MissingChoices for a choice-typed record without options and
// MalformedRecord for an empty question.
std::string format_task(const TaskRecord& record);

// Pure composition: phrase + '\n' + task block for before-position
// techniques, task block + '\n' + phrase for after-position ones, and the
// bare task block for ZeroShot.
ComposedPrompt compose(const TaskRecord& record, Technique technique,
                       const PhraseLibrary& phrases = PhraseLibrary::builtin());

}  // namespace nulleval
