#include <doctest.h>

#include "nulleval/errors.hpp"
#include "nulleval/hash.hpp"
#include "nulleval/phrases.hpp"
#include "testutil.hpp"

using namespace nulleval;

namespace {
constexpr const char* kNullShot =
    "Look at examples in the \"Examples\" section and utilize examples and information from "
    "that section to perform the following task.";
}

TEST_CASE("built-in templates are the exact published phrases") {
    const auto& lib = PhraseLibrary::builtin();
    CHECK(lib.phrase(Technique::ZeroShot) == "");
    CHECK(lib.phrase(Technique::NullShot) == kNullShot);
    CHECK(lib.phrase(Technique::NullShotAfter) == kNullShot);
    CHECK(lib.phrase(Technique::ZeroCot) == "Let's think step by step.");
    CHECK(lib.phrase(Technique::NullCot) ==
          "Look at examples in the \"Examples\" section and utilize examples and information "
          "from that section to perform the following task step-by-step.");
    CHECK(lib.phrase(Technique::NullShotV1) ==
          "Utilize examples and information from the \"Examples\" section to perform the "
          "following task.");
    CHECK(lib.phrase(Technique::NullShotV2) ==
          "Look at examples in the \"Examples\" section and perform the following task.");
    CHECK(lib.phrase(Technique::NullShotV3) ==
          "Perform the following task as demonstrated in the \"Examples\" section.");
    CHECK_FALSE(lib.overridden());
}

TEST_CASE("each kind maps to exactly one position") {
    CHECK_FALSE(phrase_after_task(Technique::ZeroShot));
    CHECK_FALSE(phrase_after_task(Technique::NullShot));
    CHECK_FALSE(phrase_after_task(Technique::NullShotV1));
    CHECK_FALSE(phrase_after_task(Technique::NullShotV2));
    CHECK_FALSE(phrase_after_task(Technique::NullShotV3));
    CHECK(phrase_after_task(Technique::NullShotAfter));
    CHECK(phrase_after_task(Technique::ZeroCot));
    CHECK(phrase_after_task(Technique::NullCot));
}

TEST_CASE("template hashes are the SHA-256 of the template text") {
    const auto& lib = PhraseLibrary::builtin();
    CHECK(lib.phrase_hash(Technique::NullShot) == sha256_hex(kNullShot));
    CHECK(lib.phrase_hash(Technique::ZeroShot) == sha256_hex(""));
    CHECK(lib.hashes().size() == 8);
    CHECK(lib.hashes().at("zero_cot") == sha256_hex("Let's think step by step."));
}

TEST_CASE("override file replaces only the named templates") {
    testutil::TempDir tmp;
    const auto file = tmp.path / "phrases.txt";
    testutil::write_file(file, "# research override\nzero_cot=Repeat after me.\n\n");
    const auto lib = PhraseLibrary::from_file(file);
    CHECK(lib.overridden());
    CHECK(lib.phrase(Technique::ZeroCot) == "Repeat after me.");
    CHECK(lib.phrase(Technique::NullShot) == kNullShot);
    CHECK(lib.phrase_hash(Technique::ZeroCot) == sha256_hex("Repeat after me."));
    CHECK(lib.phrase_hash(Technique::ZeroCot) !=
          PhraseLibrary::builtin().phrase_hash(Technique::ZeroCot));
    CHECK(lib.phrase_hash(Technique::NullShot) ==
          PhraseLibrary::builtin().phrase_hash(Technique::NullShot));
}

TEST_CASE("override file rejects unknown keys and malformed lines") {
    testutil::TempDir tmp;
    const auto bad_key = tmp.path / "bad_key.txt";
    testutil::write_file(bad_key, "one_shot=nope\n");
    CHECK_THROWS_AS((void)PhraseLibrary::from_file(bad_key), ConfigError);

    const auto zero_shot = tmp.path / "zero_shot.txt";
    testutil::write_file(zero_shot, "zero_shot=should fail\n");
    CHECK_THROWS_AS((void)PhraseLibrary::from_file(zero_shot), ConfigError);

    const auto no_eq = tmp.path / "no_eq.txt";
    testutil::write_file(no_eq, "null_shot template without equals\n");
    CHECK_THROWS_AS((void)PhraseLibrary::from_file(no_eq), ConfigError);

    CHECK_THROWS_AS((void)PhraseLibrary::from_file(tmp.path / "missing.txt"), ConfigError);
}
