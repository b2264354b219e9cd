#include "nulleval/phrases.hpp"

#include <fstream>

#include "nulleval/errors.hpp"
#include "nulleval/hash.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

namespace {

constexpr std::string_view kNullShotPhrase =
    "Look at examples in the \"Examples\" section and utilize examples and information "
    "from that section to perform the following task.";

constexpr std::string_view kNullCotPhrase =
    "Look at examples in the \"Examples\" section and utilize examples and information "
    "from that section to perform the following task step-by-step.";

constexpr std::string_view kZeroCotPhrase = "Let's think step by step.";

constexpr std::string_view kNullShotV1Phrase =
    "Utilize examples and information from the \"Examples\" section to perform the "
    "following task.";

constexpr std::string_view kNullShotV2Phrase =
    "Look at examples in the \"Examples\" section and perform the following task.";

constexpr std::string_view kNullShotV3Phrase =
    "Perform the following task as demonstrated in the \"Examples\" section.";

}  // namespace

bool phrase_after_task(Technique t) {
    switch (t) {
        case Technique::NullShotAfter:
        case Technique::ZeroCot:
        case Technique::NullCot:
            return true;
        default:
            return false;
    }
}

PhraseLibrary::PhraseLibrary() {
    phrases_[Technique::ZeroShot] = "";
    phrases_[Technique::NullShot] = std::string(kNullShotPhrase);
    phrases_[Technique::NullShotAfter] = std::string(kNullShotPhrase);
    phrases_[Technique::ZeroCot] = std::string(kZeroCotPhrase);
    phrases_[Technique::NullCot] = std::string(kNullCotPhrase);
    phrases_[Technique::NullShotV1] = std::string(kNullShotV1Phrase);
    phrases_[Technique::NullShotV2] = std::string(kNullShotV2Phrase);
    phrases_[Technique::NullShotV3] = std::string(kNullShotV3Phrase);
    rehash();
}

void PhraseLibrary::rehash() {
    for (const auto& [tech, phrase] : phrases_) {
        hashes_[tech] = sha256_hex(phrase);
    }
}

const PhraseLibrary& PhraseLibrary::builtin() {
    static const PhraseLibrary lib;
    return lib;
}

PhraseLibrary PhraseLibrary::from_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open phrase file: " + file.string());
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!text::is_valid_utf8(contents)) {
        throw ConfigError("phrase file is not valid UTF-8: " + file.string());
    }

    PhraseLibrary lib;
    bool any = false;
    std::size_t line_no = 0;
    for (auto line : text::split_lines(contents)) {
        ++line_no;
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("phrase file line " + std::to_string(line_no) +
                              " is not a key=template entry");
        }
        const auto key = text::trim(line.substr(0, eq));
        const Technique tech = technique_from_name(key);
        if (tech == Technique::ZeroShot) {
            throw ConfigError("zero_shot carries no phrase and cannot be overridden");
        }
        lib.phrases_[tech] = std::string(line.substr(eq + 1));
        any = true;
    }
    lib.overridden_ = any;
    lib.rehash();
    return lib;
}

const std::string& PhraseLibrary::phrase(Technique t) const { return phrases_.at(t); }

const std::string& PhraseLibrary::phrase_hash(Technique t) const { return hashes_.at(t); }

std::map<std::string, std::string> PhraseLibrary::hashes() const {
    std::map<std::string, std::string> out;
    for (const auto& [tech, hash] : hashes_) {
        out[std::string(technique_name(tech))] = hash;
    }
    return out;
}

}  // namespace nulleval
