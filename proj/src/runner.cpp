#include "nulleval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <httplib.h>

#include "nulleval/datasets.hpp"
#include "nulleval/errors.hpp"
#include "nulleval/hash.hpp"
#include "nulleval/version.hpp"

namespace nulleval {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

PhraseLibrary phrases_for(const RunConfig& config) {
    return config.phrase_file ? PhraseLibrary::from_file(*config.phrase_file)
                              : PhraseLibrary::builtin();
}

struct LoadedDataset {
    std::vector<TaskRecord> records;
    ManifestDataset info;
};

// Loads, fingerprints, and (when configured) downsamples one dataset. Count
// conformance against the published evaluation splits is validate_run's
// job; the executor accepts desk-scale slices.
LoadedDataset prepare_dataset(const RunConfig& config, Dataset dataset) {
    const auto& source = config.datasets.at(dataset);
    LoadedDataset out;
    out.records = load_dataset(dataset, source, CountCheck::Skip);
    out.info.split = std::string(dataset_split(dataset));
    out.info.source_path = source.string();
    out.info.fingerprint = fingerprint_path(source);

    if (const auto it = config.sample_sizes.find(dataset); it != config.sample_sizes.end() &&
                                                           it->second < out.records.size()) {
        auto sampled = downsample(out.records, it->second, config.sample_seed);
        out.records = std::move(sampled.records);
        out.info.sampled_ids = std::move(sampled.record_ids);
    }
    if (config.max_records_per_cell && out.records.size() > *config.max_records_per_cell) {
        out.records.resize(*config.max_records_per_cell);
    }
    out.info.count = out.records.size();
    return out;
}

struct PromptStore {
    std::mutex mutex;
    std::map<std::string, std::string> by_hash;

    void put(const std::string& hash, const std::string& text) {
        std::lock_guard lock(mutex);
        by_hash.emplace(hash, text);
    }

    // Rewritten whole and sorted by hash, so the sidecar is byte-stable no
    // matter how workers interleaved.
    void write(const fs::path& file) {
        std::lock_guard lock(mutex);
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        for (const auto& [hash, text] : by_hash) {
            out << ordered_json{{"hash", hash}, {"text", text}}.dump() << '\n';
        }
    }

    void load(const fs::path& file) {
        if (!fs::exists(file)) return;
        std::ifstream in(file, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = json::parse(line, nullptr, false);
            if (j.is_discarded()) continue;
            by_hash.emplace(j.at("hash").get<std::string>(), j.at("text").get<std::string>());
        }
    }
};

struct CellWork {
    CellState state;
    const std::vector<TaskRecord>* records = nullptr;
    Provider* provider = nullptr;
    std::string family;
};

// Drives one cell sequentially; cells are the unit of parallelism so each
// results file is written in source order regardless of worker count.
std::size_t execute_cell(CellWork& work, const PhraseLibrary& phrases, const fs::path& run_dir,
                         const GenerationParams& params, PromptStore& prompts) {
    const fs::path results_path = run_dir / work.state.results_file;
    std::set<std::string> done;
    for (const auto& r : read_record_results(results_path)) done.insert(r.record_id);

    std::size_t pending = 0;
    AppendLineWriter writer(results_path);
    for (const auto& record : *work.records) {
        if (done.count(record.record_id)) continue;
        const ComposedPrompt prompt = compose(record, work.state.key.technique, phrases);
        const std::string prompt_hash = sha256_hex(prompt.text);
        prompts.put(prompt_hash, prompt.text);

        ModelResponse response;
        try {
            response = work.provider->generate(prompt, params);
        } catch (const ProviderError&) {
            // Transport-class failure: leave the record pending for resume.
            ++pending;
            continue;
        }

        RecordResult result;
        result.record_id = record.record_id;
        result.technique = work.state.key.technique;
        result.prompt_hash = prompt_hash;
        result.raw_text = response.raw_text;
        result.outcome = extract_answer(response.raw_text, record);
        result.correct = score(result.outcome, record.gold);
        result.refusal = detect_refusal(response.raw_text, work.family);
        result.empty = response.empty;
        result.attempt = response.attempt;
        result.latency_ms = response.latency_ms;
        writer.append(record_result_to_json(result).dump());
        done.insert(record.record_id);
    }
    return pending;
}

struct PreparedRun {
    RunConfig config;
    PhraseLibrary phrases;
    std::map<Dataset, std::vector<TaskRecord>> records;
    RunManifest manifest;
};

PreparedRun prepare(const RunConfig& config) {
    validate_config(config);
    PreparedRun prepared{config, phrases_for(config), {}, {}};

    prepared.manifest.tool_version = kVersion;
    prepared.manifest.created_utc = utc_now();
    prepared.manifest.config = run_config_to_json(config);
    prepared.manifest.template_hashes = prepared.phrases.hashes();

    for (const auto& [dataset, _] : config.datasets) {
        auto loaded = prepare_dataset(config, dataset);
        prepared.manifest.datasets[std::string(dataset_name(dataset))] = loaded.info;
        prepared.records[dataset] = std::move(loaded.records);
    }

    for (const auto& provider : config.providers) {
        for (const auto& [dataset, _] : config.datasets) {
            for (Technique technique : config.techniques) {
                CellState cell;
                cell.key = CellKey{provider.name, dataset, technique};
                cell.total = prepared.records.at(dataset).size();
                cell.results_file = "results/" + cell.key.stem() + ".jsonl";
                prepared.manifest.cells.push_back(std::move(cell));
            }
        }
    }
    return prepared;
}

RunOutcome execute(PreparedRun prepared, const fs::path& run_dir) {
    fs::create_directories(run_dir / "results");

    PromptStore prompts;
    prompts.load(run_dir / "prompts.jsonl");

    std::map<std::string, std::unique_ptr<Provider>> providers;
    std::map<std::string, std::string> families;
    for (const auto& profile : prepared.config.providers) {
        providers[profile.name] = make_provider(profile);
        families[profile.name] = profile.family;
    }

    std::vector<CellWork> work;
    for (auto& cell : prepared.manifest.cells) {
        CellWork w;
        w.state = cell;
        w.records = &prepared.records.at(cell.key.dataset);
        w.provider = providers.at(cell.key.provider).get();
        w.family = families.at(cell.key.provider);
        work.push_back(std::move(w));
    }

    const fs::path manifest_path = run_dir / "manifest.json";
    prepared.manifest.save(manifest_path);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> pending_total{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= work.size()) return;
            try {
                pending_total += execute_cell(work[i], prepared.phrases, run_dir,
                                              prepared.config.params, prompts);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const auto thread_count = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(prepared.config.workers), work.size()));
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < thread_count; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    prompts.write(run_dir / "prompts.jsonl");

    for (auto& cell : prepared.manifest.cells) {
        cell.completed = read_record_results(run_dir / cell.results_file).size();
    }
    prepared.manifest.finished_utc = utc_now();
    prepared.manifest.save(manifest_path);

    RunOutcome outcome;
    outcome.manifest = prepared.manifest;
    outcome.manifest_path = manifest_path;
    outcome.pending = pending_total.load();

    const bool all_complete = std::all_of(prepared.manifest.cells.begin(),
                                          prepared.manifest.cells.end(),
                                          [](const CellState& c) { return c.complete(); });
    if (all_complete) {
        const auto cells = aggregate_cells(prepared.manifest, run_dir);
        const auto bundle =
            render_report(cells, prepared.config.baseline_technique, "run report");
        std::ofstream md(run_dir / "report.md", std::ios::binary | std::ios::trunc);
        md << bundle.markdown;
        for (const auto& [name, contents] : bundle.csv_files) {
            std::ofstream csv(run_dir / name, std::ios::binary | std::ios::trunc);
            csv << contents;
        }
        outcome.reports_written = true;
    }
    return outcome;
}

}  // namespace

std::string_view severity_name(Diagnostic::Severity s) {
    switch (s) {
        case Diagnostic::Severity::Info: return "info";
        case Diagnostic::Severity::Warning: return "warning";
        case Diagnostic::Severity::Error: return "error";
    }
    return "info";
}

std::vector<Diagnostic> validate_run(const RunConfig& config, bool check_providers) {
    std::vector<Diagnostic> diags;
    auto add = [&](Diagnostic::Severity severity, std::string code, std::string message) {
        diags.push_back({severity, std::move(code), std::move(message)});
    };

    try {
        validate_config(config);
    } catch (const ConfigError& e) {
        add(Diagnostic::Severity::Error, "config", e.what());
        return diags;
    }

    try {
        const auto phrases = phrases_for(config);
        for (const auto& [technique, hash] : phrases.hashes()) {
            add(Diagnostic::Severity::Info, "template", technique + " hash " + hash);
        }
        if (phrases.overridden()) {
            add(Diagnostic::Severity::Warning, "template",
                "phrase templates overridden by " + config.phrase_file->string());
        }
    } catch (const Error& e) {
        add(Diagnostic::Severity::Error, "template", e.what());
    }

    for (const auto& [dataset, source] : config.datasets) {
        const std::string name(dataset_name(dataset));
        if (!fs::exists(source)) {
            add(Diagnostic::Severity::Error, "dataset", name + ": missing source " +
                                                            source.string());
            continue;
        }
        try {
            const auto records = load_dataset(dataset, source, CountCheck::Enforce);
            std::size_t count = records.size();
            if (const auto it = config.sample_sizes.find(dataset);
                it != config.sample_sizes.end()) {
                if (it->second > records.size()) {
                    throw InsufficientRecords(it->second, records.size());
                }
                count = downsample(records, it->second, config.sample_seed).records.size();
            }
            if (dataset == Dataset::TriviaQa && count != dataset_expected_count(dataset)) {
                throw CountMismatch(name, dataset_expected_count(dataset), count);
            }
            add(Diagnostic::Severity::Info, "dataset",
                name + ": " + std::to_string(count) + " records, fingerprint " +
                    fingerprint_path(source));
        } catch (const Error& e) {
            add(Diagnostic::Severity::Error, "dataset", name + ": " + std::string(e.what()));
        }
    }

    for (const auto& profile : config.providers) {
        if (profile.is_mock()) {
            if (!fs::exists(*profile.fixture)) {
                add(Diagnostic::Severity::Error, "provider",
                    profile.name + ": fixture missing at " + profile.fixture->string());
            }
            continue;
        }
        if (!check_providers) continue;
        try {
            const auto scheme_end = profile.base_url.find("://");
            const auto path_start = profile.base_url.find('/', scheme_end + 3);
            const std::string host = path_start == std::string::npos
                                         ? profile.base_url
                                         : profile.base_url.substr(0, path_start);
            httplib::Client client(host);
            client.set_connection_timeout(5, 0);
            if (auto res = client.Get("/")) {
                add(Diagnostic::Severity::Info, "provider", profile.name + ": reachable");
            } else {
                add(Diagnostic::Severity::Warning, "provider",
                    profile.name + ": unreachable (" + httplib::to_string(res.error()) + ")");
            }
        } catch (const std::exception& e) {
            add(Diagnostic::Severity::Warning, "provider",
                profile.name + ": " + std::string(e.what()));
        }
    }
    return diags;
}

RunOutcome run(const RunConfig& config) {
    const fs::path run_dir = config.output_dir;
    if (fs::exists(run_dir / "manifest.json")) {
        throw ConfigError("output_dir already holds a run; use resume on " +
                          (run_dir / "manifest.json").string());
    }
    fs::create_directories(run_dir);
    return execute(prepare(config), run_dir);
}

RunOutcome resume(const fs::path& manifest_path) {
    const RunManifest previous = RunManifest::load(manifest_path);
    const fs::path run_dir = manifest_path.parent_path();
    const RunConfig config = run_config_from_json(previous.config);

    PreparedRun prepared = prepare(config);

    for (const auto& [name, info] : previous.datasets) {
        const auto it = prepared.manifest.datasets.find(name);
        if (it == prepared.manifest.datasets.end()) {
            throw ManifestMismatch("dataset " + name + " vanished from the configuration");
        }
        if (it->second.fingerprint != info.fingerprint) {
            throw ManifestMismatch("dataset " + name + " changed on disk (fingerprint " +
                                   it->second.fingerprint + " != manifest " + info.fingerprint +
                                   ")");
        }
        if (it->second.sampled_ids != info.sampled_ids) {
            throw ManifestMismatch("dataset " + name + " no longer yields the sampled ids");
        }
        if (it->second.count != info.count) {
            throw ManifestMismatch("dataset " + name + " record count changed");
        }
    }
    if (prepared.manifest.template_hashes != previous.template_hashes) {
        throw ManifestMismatch("phrase template hashes changed since the manifest was written");
    }

    prepared.manifest.created_utc = previous.created_utc;
    return execute(std::move(prepared), run_dir);
}

std::vector<CellResult> aggregate_cells(const RunManifest& manifest, const fs::path& run_dir) {
    std::vector<CellResult> cells;
    for (const auto& cell : manifest.cells) {
        const auto results = read_record_results(run_dir / cell.results_file);
        CellResult aggregate;
        aggregate.model = cell.key.provider;
        aggregate.dataset = cell.key.dataset;
        aggregate.technique = cell.key.technique;
        // Aggregation keys on record_id, so worker scheduling cannot change
        // the outcome; duplicates would mean a persistence bug.
        std::set<std::string> seen;
        for (const auto& r : results) {
            if (!seen.insert(r.record_id).second) {
                throw Error("duplicate record " + r.record_id + " in " + cell.results_file);
            }
            ++aggregate.n;
            if (r.correct) ++aggregate.correct;
            if (!r.outcome.has_answer()) ++aggregate.no_answer;
            if (r.empty) ++aggregate.empty;
            if (r.refusal) ++aggregate.refusals;
        }
        cells.push_back(std::move(aggregate));
    }
    return cells;
}

ReportBundle report(const fs::path& manifest_path, bool write_files) {
    const RunManifest manifest = RunManifest::load(manifest_path);
    const fs::path run_dir = manifest_path.parent_path();

    std::vector<std::string> missing;
    for (const auto& cell : manifest.cells) {
        const auto done = read_record_results(run_dir / cell.results_file).size();
        if (done < cell.total) {
            missing.push_back(cell.key.stem() + " (" + std::to_string(done) + "/" +
                              std::to_string(cell.total) + ")");
        }
    }
    if (!missing.empty()) {
        std::string what = "run is incomplete:";
        for (const auto& m : missing) what += " " + m;
        throw IncompleteRun(what, missing);
    }

    const RunConfig config = run_config_from_json(manifest.config);
    const auto cells = aggregate_cells(manifest, run_dir);
    auto bundle = render_report(cells, config.baseline_technique, "run report");
    if (write_files) {
        std::ofstream md(run_dir / "report.md", std::ios::binary | std::ios::trunc);
        md << bundle.markdown;
        for (const auto& [name, contents] : bundle.csv_files) {
            std::ofstream csv(run_dir / name, std::ios::binary | std::ios::trunc);
            csv << contents;
        }
    }
    return bundle;
}

}  // namespace nulleval
