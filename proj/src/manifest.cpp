#include "nulleval/manifest.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nulleval/errors.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json record_result_to_json(const RecordResult& r) {
    ordered_json j;
    j["record_id"] = r.record_id;
    j["technique"] = technique_name(r.technique);
    j["prompt_hash"] = r.prompt_hash;
    j["raw_text"] = r.raw_text;
    ordered_json outcome;
    switch (r.outcome.kind) {
        case ExtractionOutcome::Kind::Choice: outcome["kind"] = "choice"; break;
        case ExtractionOutcome::Kind::Number: outcome["kind"] = "number"; break;
        case ExtractionOutcome::Kind::Alias: outcome["kind"] = "alias"; break;
        case ExtractionOutcome::Kind::NoAnswer: outcome["kind"] = "no_answer"; break;
    }
    outcome["value"] = r.outcome.value;
    outcome["rule"] = extract_rule_name(r.outcome.rule);
    outcome["line"] = line_used_name(r.outcome.line);
    j["outcome"] = std::move(outcome);
    j["correct"] = r.correct;
    j["refusal"] = r.refusal;
    j["empty"] = r.empty;
    j["attempt"] = r.attempt;
    j["latency_ms"] = r.latency_ms;
    return j;
}

RecordResult record_result_from_json(const json& j) {
    RecordResult r;
    r.record_id = j.at("record_id").get<std::string>();
    r.technique = technique_from_name(j.at("technique").get<std::string>());
    r.prompt_hash = j.at("prompt_hash").get<std::string>();
    r.raw_text = j.at("raw_text").get<std::string>();
    const auto& outcome = j.at("outcome");
    const std::string kind = outcome.at("kind").get<std::string>();
    if (kind == "choice") {
        r.outcome.kind = ExtractionOutcome::Kind::Choice;
    } else if (kind == "number") {
        r.outcome.kind = ExtractionOutcome::Kind::Number;
    } else if (kind == "alias") {
        r.outcome.kind = ExtractionOutcome::Kind::Alias;
    } else if (kind == "no_answer") {
        r.outcome.kind = ExtractionOutcome::Kind::NoAnswer;
    } else {
        throw SchemaError("unknown outcome kind '" + kind + "'");
    }
    r.outcome.value = outcome.at("value").get<std::string>();
    r.outcome.rule = extract_rule_from_name(outcome.at("rule").get<std::string>());
    r.outcome.line = line_used_from_name(outcome.at("line").get<std::string>());
    r.correct = j.at("correct").get<bool>();
    r.refusal = j.at("refusal").get<bool>();
    r.empty = j.at("empty").get<bool>();
    r.attempt = j.at("attempt").get<int>();
    r.latency_ms = j.at("latency_ms").get<std::int64_t>();
    return r;
}

std::string CellKey::stem() const {
    return provider + "__" + std::string(dataset_name(dataset)) + "__" +
           std::string(technique_name(technique));
}

bool CellKey::operator<(const CellKey& other) const {
    if (provider != other.provider) return provider < other.provider;
    if (dataset != other.dataset) return dataset < other.dataset;
    return technique < other.technique;
}

void RunManifest::save(const std::filesystem::path& file) const {
    ordered_json j;
    j["tool_version"] = tool_version;
    j["created_utc"] = created_utc;
    j["finished_utc"] = finished_utc;
    j["config"] = config;
    j["template_hashes"] = template_hashes;
    ordered_json datasets_json;
    for (const auto& [name, info] : datasets) {
        ordered_json d;
        d["split"] = info.split;
        d["source_path"] = info.source_path;
        d["fingerprint"] = info.fingerprint;
        d["count"] = info.count;
        d["sampled_ids"] = info.sampled_ids;
        datasets_json[name] = std::move(d);
    }
    j["datasets"] = std::move(datasets_json);
    ordered_json cells_json = ordered_json::array();
    for (const auto& cell : cells) {
        ordered_json c;
        c["provider"] = cell.key.provider;
        c["dataset"] = dataset_name(cell.key.dataset);
        c["technique"] = technique_name(cell.key.technique);
        c["total"] = cell.total;
        c["completed"] = cell.completed;
        c["results_file"] = cell.results_file;
        cells_json.push_back(std::move(c));
    }
    j["cells"] = std::move(cells_json);

    // Write-then-rename keeps the manifest whole even if we crash here.
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write manifest: " + file.string());
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, file);
}

RunManifest RunManifest::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open manifest: " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw Error("manifest " + file.string() + " is not valid JSON: " + e.what());
    }
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.created_utc = j.value("created_utc", "");
    m.finished_utc = j.value("finished_utc", "");
    m.config = j.at("config");
    m.template_hashes = j.at("template_hashes").get<std::map<std::string, std::string>>();
    for (const auto& [name, d] : j.at("datasets").items()) {
        ManifestDataset info;
        info.split = d.at("split").get<std::string>();
        info.source_path = d.at("source_path").get<std::string>();
        info.fingerprint = d.at("fingerprint").get<std::string>();
        info.count = d.at("count").get<std::size_t>();
        info.sampled_ids = d.at("sampled_ids").get<std::vector<std::string>>();
        m.datasets[name] = std::move(info);
    }
    for (const auto& c : j.at("cells")) {
        CellState cell;
        cell.key.provider = c.at("provider").get<std::string>();
        cell.key.dataset = dataset_from_name(c.at("dataset").get<std::string>());
        cell.key.technique = technique_from_name(c.at("technique").get<std::string>());
        cell.total = c.at("total").get<std::size_t>();
        cell.completed = c.at("completed").get<std::size_t>();
        cell.results_file = c.at("results_file").get<std::string>();
        m.cells.push_back(std::move(cell));
    }
    return m;
}

AppendLineWriter::AppendLineWriter(const std::filesystem::path& file) : path_(file) {
    fd_ = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd_ < 0) {
        throw Error("cannot open " + file.string() + " for append: " + std::strerror(errno));
    }
}

AppendLineWriter::~AppendLineWriter() {
    if (fd_ >= 0) ::close(fd_);
}

void AppendLineWriter::append(std::string_view line) {
    std::string buf(line);
    buf += '\n';
    std::size_t written = 0;
    while (written < buf.size()) {
        const auto n = ::write(fd_, buf.data() + written, buf.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error("write to " + path_.string() + " failed: " + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        throw Error("fsync of " + path_.string() + " failed: " + std::strerror(errno));
    }
}

std::vector<RecordResult> read_record_results(const std::filesystem::path& file) {
    std::vector<RecordResult> results;
    if (!std::filesystem::exists(file)) return results;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open results file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string contents = buf.str();

    std::size_t good_bytes = 0;
    std::size_t start = 0;
    while (start < contents.size()) {
        const auto nl = contents.find('\n', start);
        if (nl == std::string::npos) break;  // partial trailing line, dropped
        const std::string_view line(contents.data() + start, nl - start);
        if (!text::is_blank(line)) {
            try {
                results.push_back(record_result_from_json(json::parse(line)));
            } catch (const json::parse_error&) {
                break;  // damaged tail; everything before it stays valid
            }
        }
        start = nl + 1;
        good_bytes = start;
    }
    if (good_bytes < contents.size()) {
        std::filesystem::resize_file(file, good_bytes);
    }
    return results;
}

}  // namespace nulleval
