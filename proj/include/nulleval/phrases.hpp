#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "nulleval/types.hpp"

namespace nulleval {

// True for techniques whose phrase goes after the task block; ZeroShot has
// no phrase and every remaining technique places it before.
bool phrase_after_task(Technique t);

// Immutable table of the exact phrase template per technique. The embedded
// table ships with the binary; a key=template override file can replace
// individual entries for research extensions (the run manifest records the
// resulting hashes either way).
class PhraseLibrary {
public:
    static const PhraseLibrary& builtin();

    // Parses a UTF-8 override file of `technique_key=template` lines.
    // Blank lines and lines starting with '#' are skipped. Unknown keys are
    // a ConfigError. Techniques not mentioned keep their built-in template.
    static PhraseLibrary from_file(const std::filesystem::path& file);

    // Empty string for ZeroShot.
    const std::string& phrase(Technique t) const;
    // SHA-256 of the template text (hash of "" for ZeroShot).
    const std::string& phrase_hash(Technique t) const;
    // technique key -> hash, for the run manifest.
    std::map<std::string, std::string> hashes() const;

    bool overridden() const { return overridden_; }

private:
    PhraseLibrary();
    std::map<Technique, std::string> phrases_;
    std::map<Technique, std::string> hashes_;
    bool overridden_ = false;
    void rehash();
};

}  // namespace nulleval
