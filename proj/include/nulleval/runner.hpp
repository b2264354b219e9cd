#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nulleval/config.hpp"
#include "nulleval/manifest.hpp"
#include "nulleval/metrics.hpp"
#include "nulleval/report.hpp"

namespace nulleval {

struct Diagnostic {
    enum class Severity { Info, Warning, Error };
    Severity severity = Severity::Info;
    std::string code;
    std::string message;
};

std::string_view severity_name(Diagnostic::Severity s);

// Checks a configuration against its inputs without querying any model:
// structural invariants, dataset parse + evaluation-count conformance,
// template hashes, fixture presence, and (optionally) provider
// reachability. Never throws; problems come back as Error diagnostics.
std::vector<Diagnostic> validate_run(const RunConfig& config, bool check_providers = false);

struct RunOutcome {
    RunManifest manifest;
    std::filesystem::path manifest_path;
    std::size_t pending = 0;  // records left incomplete by transport failures
    bool reports_written = false;
};

// Executes a full run: for every (provider, dataset, technique, record)
// compose -> generate once -> extract -> score -> classify, persisting one
// JSONL line per record as it completes. When every cell is complete the
// reports are rendered into the output directory. The output directory must
// not already hold a manifest; interrupted runs continue via resume().
RunOutcome run(const RunConfig& config);

// Re-opens a persisted run and executes only the records that are not yet
// in the results files; completed records are never re-queried. Throws
// ManifestMismatch when dataset fingerprints, sampled ids, or phrase
// template hashes no longer match the manifest.
RunOutcome resume(const std::filesystem::path& manifest_path);

// Recomputes cells from the persisted results of a finished run and renders
// the reports. Throws IncompleteRun (listing pending cells) when records
// are still missing.
ReportBundle report(const std::filesystem::path& manifest_path, bool write_files = true);

// Aggregates persisted per-record results into per-cell counts.
std::vector<CellResult> aggregate_cells(const RunManifest& manifest,
                                        const std::filesystem::path& run_dir);

}  // namespace nulleval
