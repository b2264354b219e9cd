#include <doctest.h>

#include <algorithm>
#include <set>

#include "nulleval/compose.hpp"
#include "nulleval/datasets.hpp"
#include "nulleval/errors.hpp"
#include "nulleval/hash.hpp"
#include "testutil.hpp"

using namespace nulleval;
using testutil::TempDir;

TEST_CASE("aqua adapter keeps native labels and strips them from the text") {
    TempDir tmp;
    const auto src = tmp.path / "aqua.jsonl";
    testutil::write_aqua_jsonl(src, 5);
    const auto records = load_dataset(Dataset::Aqua, src, CountCheck::Skip);
    REQUIRE(records.size() == 5);
    CHECK(records[0].record_id == "test:0");
    CHECK(records[0].answer_type == AnswerType::MultipleChoice);
    REQUIRE(records[0].choices.size() == 5);
    CHECK(records[0].choices[0].first == "A");
    CHECK(records[0].choices[0].second == "0");
    CHECK(records[0].choices[4].first == "E");
    CHECK(records[0].gold.choice_label == "B");
}

TEST_CASE("gsm8k adapter reads the final-value marker") {
    TempDir tmp;
    const auto src = tmp.path / "gsm8k.jsonl";
    testutil::write_gsm8k_jsonl(src, 4);
    const auto records = load_dataset(Dataset::Gsm8k, src, CountCheck::Skip);
    REQUIRE(records.size() == 4);
    CHECK(records[0].answer_type == AnswerType::Number);
    CHECK(records[0].choices.empty());
    CHECK(records[2].gold.number == "4");

    // Comma-grouped final values are normalized.
    testutil::write_file(src, R"({"question": "big?", "answer": "lots\n#### 1,234"})"
                              "\n");
    CHECK(load_dataset(Dataset::Gsm8k, src, CountCheck::Skip)[0].gold.number == "1234");

    testutil::write_file(src, R"({"question": "q", "answer": "no marker"})"
                              "\n");
    CHECK_THROWS_AS((void)load_dataset(Dataset::Gsm8k, src, CountCheck::Skip), SchemaError);
}

TEST_CASE("strategyqa adapter maps booleans onto True/False choices") {
    TempDir tmp;
    const auto src = tmp.path / "task.json";
    testutil::write_strategyqa_json(src, 3);
    const auto records = load_dataset(Dataset::StrategyQa, src, CountCheck::Skip);
    REQUIRE(records.size() == 3);
    CHECK(records[0].answer_type == AnswerType::BinaryChoice);
    REQUIRE(records[0].choices.size() == 2);
    CHECK(records[0].choices[0] == std::pair<std::string, std::string>{"A", "True"});
    CHECK(records[0].choices[1] == std::pair<std::string, std::string>{"B", "False"});
    CHECK(records[0].gold.choice_label == "A");  // Yes
    CHECK(records[1].gold.choice_label == "B");  // No
}

TEST_CASE("winogrande adapter uses numeric labels and native ids") {
    TempDir tmp;
    const auto src = tmp.path / "dev.jsonl";
    testutil::write_winogrande_jsonl(src, 3);
    const auto records = load_dataset(Dataset::WinoGrande, src, CountCheck::Skip);
    REQUIRE(records.size() == 3);
    CHECK(records[0].record_id == "wg-0");
    CHECK(records[0].choices[0].first == "1");
    CHECK(records[0].choices[1].first == "2");
    CHECK(records[1].gold.choice_label == "2");

    testutil::write_file(src,
                         R"({"qID": "x", "sentence": "s _", "option1": "a", "option2": "b", "answer": "3"})"
                         "\n");
    CHECK_THROWS_AS((void)load_dataset(Dataset::WinoGrande, src, CountCheck::Skip), SchemaError);
}

TEST_CASE("race adapter expands passages into per-question records") {
    TempDir tmp;
    const auto src = tmp.path / "race_m.jsonl";
    testutil::write_race_jsonl(src, 10, "m");
    const auto records = load_dataset(Dataset::RaceMiddle, src, CountCheck::Skip);
    REQUIRE(records.size() == 10);
    CHECK(records[0].record_id == "m0.txt:0");
    CHECK(records[4].record_id == "m1.txt:0");
    REQUIRE(records[0].context.size() == 1);
    CHECK(records[0].context[0].first == "Article");
    CHECK(records[0].choices[0].first == "A");
    CHECK(records[0].choices[3].first == "D");

    // Directory layout: one JSON file per passage, read in name order.
    const auto dir = tmp.path / "race_dir";
    std::filesystem::create_directories(dir);
    testutil::write_file(dir / "m10.txt",
                         R"({"id": "m10.txt", "article": "a", "questions": ["q1"],)"
                         R"( "options": [["w", "x", "y", "z"]], "answers": ["C"]})");
    testutil::write_file(dir / "m02.txt",
                         R"({"id": "m02.txt", "article": "b", "questions": ["q2"],)"
                         R"( "options": [["w", "x", "y", "z"]], "answers": ["A"]})");
    const auto from_dir = load_dataset(Dataset::RaceMiddle, dir, CountCheck::Skip);
    REQUIRE(from_dir.size() == 2);
    CHECK(from_dir[0].record_id == "m02.txt:0");
    CHECK(from_dir[1].record_id == "m10.txt:0");
}

TEST_CASE("anli adapter emits Context then Hypothesis and the fixed question") {
    TempDir tmp;
    const auto src = tmp.path / "anli.jsonl";
    testutil::write_anli_jsonl(src, 3);
    const auto records = load_dataset(Dataset::Anli, src, CountCheck::Skip);
    REQUIRE(records.size() == 3);
    CHECK(records[0].record_id == "anli-r3-0");
    REQUIRE(records[0].context.size() == 2);
    CHECK(records[0].context[0].first == "Context");
    CHECK(records[0].context[1].first == "Hypothesis");
    CHECK(records[0].question ==
          "Does the hypothesis imply 'entailment,' 'neutral,' or 'contradiction' in the given "
          "context?");
    CHECK(records[0].gold.choice_label == "A");
    CHECK(records[1].gold.choice_label == "B");
    CHECK(records[2].gold.choice_label == "C");

    testutil::write_file(src, R"({"uid": "u", "premise": "p", "hypothesis": "h", "label": "x"})"
                              "\n");
    CHECK_THROWS_AS((void)load_dataset(Dataset::Anli, src, CountCheck::Skip), SchemaError);
}

TEST_CASE("triviaqa adapter prefers normalized aliases") {
    TempDir tmp;
    const auto src = tmp.path / "triviaqa.json";
    testutil::write_triviaqa_json(src, 3);
    const auto records = load_dataset(Dataset::TriviaQa, src, CountCheck::Skip);
    REQUIRE(records.size() == 3);
    CHECK(records[0].record_id == "tq_0000");
    CHECK(records[0].answer_type == AnswerType::FreeText);
    REQUIRE(records[0].gold.aliases.size() == 1);
    CHECK(records[0].gold.aliases[0] == "city0");

    testutil::write_file(src, R"({"Data": [{"Question": "q", "QuestionId": "tq_1",)"
                              R"( "Answer": {"Aliases": []}}]})");
    CHECK_THROWS_AS((void)load_dataset(Dataset::TriviaQa, src, CountCheck::Skip), SchemaError);
}

TEST_CASE("count enforcement matches the published evaluation sizes") {
    TempDir tmp;
    const auto src = tmp.path / "gsm8k.jsonl";
    testutil::write_gsm8k_jsonl(src, 3);
    CHECK_THROWS_AS((void)load_dataset(Dataset::Gsm8k, src), CountMismatch);

    testutil::write_file(src, "");
    try {
        (void)load_dataset(Dataset::Gsm8k, src);
        FAIL("expected CountMismatch");
    } catch (const CountMismatch& e) {
        CHECK(e.expected == 1319);
        CHECK(e.got == 0);
        CHECK(e.dataset == "gsm8k");
    }

    testutil::write_gsm8k_jsonl(src, 1319);
    CHECK(load_dataset(Dataset::Gsm8k, src).size() == 1319);
}

TEST_CASE("invalid UTF-8 is a schema error, never silently replaced") {
    TempDir tmp;
    const auto src = tmp.path / "gsm8k.jsonl";
    testutil::write_file(src, std::string("{\"question\": \"q\xFF\", \"answer\": \"#### 1\"}\n"));
    CHECK_THROWS_AS((void)load_dataset(Dataset::Gsm8k, src, CountCheck::Skip), SchemaError);
}

TEST_CASE("malformed json carries the record index") {
    TempDir tmp;
    const auto src = tmp.path / "gsm8k.jsonl";
    testutil::write_file(src, R"({"question": "ok", "answer": "#### 1"})"
                              "\nnot json\n");
    try {
        (void)load_dataset(Dataset::Gsm8k, src, CountCheck::Skip);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.record_index == 1);
    }
}

TEST_CASE("two loads yield identical streams and fingerprints") {
    TempDir tmp;
    const auto src = tmp.path / "aqua.jsonl";
    testutil::write_aqua_jsonl(src, 8);
    const auto first = load_dataset(Dataset::Aqua, src, CountCheck::Skip);
    const auto second = load_dataset(Dataset::Aqua, src, CountCheck::Skip);

    const auto a = tmp.path / "a.jsonl";
    const auto b = tmp.path / "b.jsonl";
    write_normalized_records(first, a);
    write_normalized_records(second, b);
    CHECK(testutil::read_file(a) == testutil::read_file(b));

    CHECK(fingerprint_path(src) == fingerprint_path(src));
    const auto before = fingerprint_path(src);
    testutil::write_aqua_jsonl(src, 9);
    CHECK(fingerprint_path(src) != before);
}

TEST_CASE("normalized records round-trip") {
    TempDir tmp;
    const auto src = tmp.path / "anli.jsonl";
    testutil::write_anli_jsonl(src, 5);
    const auto records = load_dataset(Dataset::Anli, src, CountCheck::Skip);

    const auto out = tmp.path / "normalized.jsonl";
    write_normalized_records(records, out);
    const auto back = read_normalized_records(out);
    const auto out2 = tmp.path / "normalized2.jsonl";
    write_normalized_records(back, out2);
    CHECK(testutil::read_file(out) == testutil::read_file(out2));

    // Manifest entry captures split, expected count and fingerprint.
    const auto entry = make_manifest_entry(Dataset::Anli, src);
    CHECK(entry.split == "R3-test");
    CHECK(entry.expected_count == 1200);
    CHECK(entry.fingerprint == fingerprint_path(src));
}

TEST_CASE("build_question_block delegates to the composer") {
    TempDir tmp;
    const auto src = tmp.path / "wino.jsonl";
    testutil::write_winogrande_jsonl(src, 2);
    for (const auto& record : load_dataset(Dataset::WinoGrande, src, CountCheck::Skip)) {
        CHECK(build_question_block(record) == format_task(record));
    }
}

TEST_CASE("downsample basics") {
    TempDir tmp;
    const auto src = tmp.path / "triviaqa.json";
    testutil::write_triviaqa_json(src, 20);
    const auto records = load_dataset(Dataset::TriviaQa, src, CountCheck::Skip);

    SUBCASE("full sample is the identity for any seed") {
        for (std::uint64_t seed : {0ULL, 42ULL, 777ULL}) {
            const auto sampled = downsample(records, records.size(), seed);
            REQUIRE(sampled.records.size() == records.size());
            for (std::size_t i = 0; i < records.size(); ++i) {
                CHECK(sampled.records[i].record_id == records[i].record_id);
            }
        }
    }

    SUBCASE("empty sample") {
        CHECK(downsample(records, 0, 42).records.empty());
    }

    SUBCASE("oversized request") {
        CHECK_THROWS_AS((void)downsample(records, 21, 42), InsufficientRecords);
    }

    SUBCASE("permutation-then-prefix: subset, no duplicates, source order") {
        const auto sampled = downsample(records, 7, 42);
        REQUIRE(sampled.records.size() == 7);
        std::set<std::string> ids(sampled.record_ids.begin(), sampled.record_ids.end());
        CHECK(ids.size() == 7);
        std::vector<std::string> source_order;
        for (const auto& r : records) {
            if (ids.count(r.record_id)) source_order.push_back(r.record_id);
        }
        CHECK(source_order == sampled.record_ids);
    }

    SUBCASE("chosen set is invariant under input re-ordering") {
        auto shuffled = records;
        std::reverse(shuffled.begin(), shuffled.end());
        const auto a = downsample(records, 7, 42);
        const auto b = downsample(shuffled, 7, 42);
        CHECK(std::set<std::string>(a.record_ids.begin(), a.record_ids.end()) ==
              std::set<std::string>(b.record_ids.begin(), b.record_ids.end()));
    }
}

TEST_CASE("seeded 1000-id sample reproduces the frozen golden list") {
    TempDir tmp;
    const auto src = tmp.path / "triviaqa.json";
    testutil::write_triviaqa_json(src, 2500);
    const auto records = load_dataset(Dataset::TriviaQa, src, CountCheck::Skip);
    const auto sampled = downsample(records, 1000, 42);
    REQUIRE(sampled.record_ids.size() == 1000);

    std::string joined;
    for (const auto& id : sampled.record_ids) joined += id + "\n";
    CHECK(joined ==
          testutil::read_file(testutil::fixtures_dir() / "golden" / "triviaqa_sample_seed42.txt"));
}
