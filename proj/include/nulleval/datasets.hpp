#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nulleval/types.hpp"

namespace nulleval {

struct DatasetManifestEntry {
    Dataset dataset = Dataset::Aqua;
    std::string split;
    std::size_t expected_count = 0;
    std::string fingerprint;
};

enum class CountCheck { Enforce, Skip };

// Loads one benchmark dataset from its published distribution format and
// normalizes it into TaskRecords in stable source order.
//
// Source layout per dataset:
//   aqua        JSONL; question / options ("A)..." strings) / correct
//   gsm8k       JSONL; question / answer ending in "#### <number>"
//   strategyqa  task JSON with an "examples" array of
//               { input, target_scores: {"Yes": x, "No": y} }
//   winogrande  JSONL; qID / sentence / option1 / option2 / answer ("1"/"2")
//   race_m/h    directory of per-passage JSON files (sorted by name), or a
//               JSONL file with one passage object per line; each passage
//               carries article / questions / options / answers
//   anli        JSONL; uid / premise / hypothesis / label ("e"/"n"/"c")
//   triviaqa    JSON object with a "Data" array of
//               { Question, QuestionId, Answer: {Value, Aliases, ...} }
//
// With CountCheck::Enforce the loaded total must equal the dataset's
// expected evaluation count or CountMismatch is thrown. TriviaQA is only
// checked after downsampling, so its loader never enforces a raw count.
std::vector<TaskRecord> load_dataset(Dataset dataset, const std::filesystem::path& source,
                                     CountCheck check = CountCheck::Enforce);

DatasetManifestEntry make_manifest_entry(Dataset dataset, const std::filesystem::path& source);

struct DownsampleResult {
    std::vector<TaskRecord> records;      // chosen subset, original source order
    std::vector<std::string> record_ids;  // ids of the subset, same order
};

// Deterministic seeded sample of n records: sort ids, Fisher-Yates shuffle
// driven by a splitmix64 generator, keep the first n, then re-emit the
// chosen records in original source order. Invariant under input
// re-ordering. Throws InsufficientRecords when n exceeds the input size.
DownsampleResult downsample(const std::vector<TaskRecord>& records, std::size_t n,
                            std::uint64_t seed);

// Identical contract to format_task; lets adapters be snapshot-tested
// without pulling in the composer.
std::string build_question_block(const TaskRecord& record);

// Normalized-records interchange file: one TaskRecord per line, stable
// field order, byte-stable across loads.
void write_normalized_records(const std::vector<TaskRecord>& records,
                              const std::filesystem::path& out_file);
std::vector<TaskRecord> read_normalized_records(const std::filesystem::path& in_file);

}  // namespace nulleval
