#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nulleval/extract.hpp"
#include "nulleval/types.hpp"

namespace nulleval {

// One scored record, as persisted in a cell's results JSONL file.
struct RecordResult {
    std::string record_id;
    Technique technique = Technique::ZeroShot;
    std::string prompt_hash;  // SHA-256 of the composed prompt text
    std::string raw_text;
    ExtractionOutcome outcome;
    bool correct = false;
    bool refusal = false;
    bool empty = false;
    int attempt = 1;
    std::int64_t latency_ms = 0;
};

nlohmann::ordered_json record_result_to_json(const RecordResult& r);
RecordResult record_result_from_json(const nlohmann::json& j);

// A cell is one (provider, dataset, technique) combination; it maps 1:1 to
// a results file and to one table cell in the reports.
struct CellKey {
    std::string provider;
    Dataset dataset = Dataset::Aqua;
    Technique technique = Technique::ZeroShot;

    std::string stem() const;  // "provider__dataset__technique"
    bool operator<(const CellKey& other) const;
};

struct CellState {
    CellKey key;
    std::size_t total = 0;
    std::size_t completed = 0;
    std::string results_file;  // relative to the run directory
    bool complete() const { return completed >= total; }
};

struct ManifestDataset {
    std::string split;
    std::string source_path;
    std::string fingerprint;
    std::size_t count = 0;                  // records actually evaluated
    std::vector<std::string> sampled_ids;   // non-empty when downsampled
};

// The persisted record of one run: configuration snapshot, template hashes,
// dataset fingerprints and sampled ids, and per-cell completion state.
// Everything needed to resume, audit, or byte-reproduce the run (mock
// providers) lives here; timestamps are the only non-reproducible fields.
struct RunManifest {
    std::string tool_version;
    std::string created_utc;
    std::string finished_utc;
    nlohmann::ordered_json config;  // full RunConfig snapshot
    std::map<std::string, std::string> template_hashes;  // technique key -> hash
    std::map<std::string, ManifestDataset> datasets;     // dataset key -> info
    std::vector<CellState> cells;

    void save(const std::filesystem::path& file) const;
    static RunManifest load(const std::filesystem::path& file);
};

// Append-only JSONL writer with a write-then-fsync-line discipline, so a
// crash can lose at most in-flight records, never corrupt persisted ones.
class AppendLineWriter {
public:
    explicit AppendLineWriter(const std::filesystem::path& file);
    ~AppendLineWriter();
    AppendLineWriter(const AppendLineWriter&) = delete;
    AppendLineWriter& operator=(const AppendLineWriter&) = delete;

    void append(std::string_view line);  // line without trailing newline

private:
    int fd_ = -1;
    std::filesystem::path path_;
};

// Reads a results file, tolerating (and truncating away) a partial trailing
// line left by a crash mid-write.
std::vector<RecordResult> read_record_results(const std::filesystem::path& file);

}  // namespace nulleval
