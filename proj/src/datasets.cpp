#include "nulleval/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nulleval/compose.hpp"
#include "nulleval/errors.hpp"
#include "nulleval/hash.hpp"
#include "nulleval/text.hpp"

namespace nulleval {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string contents = buf.str();
    if (!text::is_valid_utf8(contents)) {
        throw SchemaError(file.string() + " is not valid UTF-8");
    }
    return contents;
}

json parse_json(const std::string& raw, const std::string& where, std::size_t index) {
    try {
        return json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SchemaError(where + ": " + e.what(), index);
    }
}

// Applies fn to each non-blank line of a JSONL file, parsed as JSON.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& file, Fn&& fn) {
    const std::string contents = slurp(file);
    std::size_t index = 0;
    for (auto line : text::split_lines(contents)) {
        if (text::is_blank(line)) continue;
        fn(parse_json(std::string(line), file.string(), index), index);
        ++index;
    }
}

std::string require_string(const json& j, const char* key, std::size_t index) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw SchemaError(std::string("missing or non-string field '") + key + "'", index);
    }
    return j[key].get<std::string>();
}

std::vector<TaskRecord> load_aqua(const std::filesystem::path& source) {
    std::vector<TaskRecord> records;
    for_each_jsonl(source, [&](const json& j, std::size_t i) {
        TaskRecord r;
        r.dataset = Dataset::Aqua;
        r.answer_type = AnswerType::MultipleChoice;
        r.record_id = "test:" + std::to_string(i);
        r.question = require_string(j, "question", i);
        if (!j.contains("options") || !j["options"].is_array() || j["options"].empty()) {
            throw SchemaError("missing options array", i);
        }
        for (const auto& opt : j["options"]) {
            if (!opt.is_string()) throw SchemaError("non-string option", i);
            const std::string text = opt.get<std::string>();
            // Options ship with the label glued on, e.g. "A)15.38%".
            if (text.size() < 2 || text[1] != ')' || text[0] < 'A' || text[0] > 'Z') {
                throw SchemaError("option '" + text + "' lacks an 'X)' label prefix", i);
            }
            r.choices.emplace_back(std::string(1, text[0]), text.substr(2));
        }
        r.gold = GoldAnswer::choice(require_string(j, "correct", i));
        r.validate();
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<TaskRecord> load_gsm8k(const std::filesystem::path& source) {
    std::vector<TaskRecord> records;
    for_each_jsonl(source, [&](const json& j, std::size_t i) {
        TaskRecord r;
        r.dataset = Dataset::Gsm8k;
        r.answer_type = AnswerType::Number;
        r.record_id = "test:" + std::to_string(i);
        r.question = require_string(j, "question", i);
        const std::string answer = require_string(j, "answer", i);
        const auto marker = answer.rfind("#### ");
        if (marker == std::string::npos) {
            throw SchemaError("answer lacks the '#### ' final-value marker", i);
        }
        std::string value(text::trim(std::string_view(answer).substr(marker + 5)));
        value = text::remove_all(value, ",");
        if (value.empty()) throw SchemaError("empty final value", i);
        r.gold = GoldAnswer::number_of(value);
        r.validate();
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<TaskRecord> load_strategyqa(const std::filesystem::path& source) {
    const json root = parse_json(slurp(source), source.string(), 0);
    if (!root.contains("examples") || !root["examples"].is_array()) {
        throw SchemaError(source.string() + " has no 'examples' array");
    }
    std::vector<TaskRecord> records;
    std::size_t i = 0;
    for (const auto& ex : root["examples"]) {
        TaskRecord r;
        r.dataset = Dataset::StrategyQa;
        r.answer_type = AnswerType::BinaryChoice;
        r.record_id = "test:" + std::to_string(i);
        r.question = require_string(ex, "input", i);
        if (!ex.contains("target_scores") || !ex["target_scores"].is_object()) {
            throw SchemaError("missing target_scores", i);
        }
        const auto& scores = ex["target_scores"];
        if (!scores.contains("Yes") || !scores.contains("No")) {
            throw SchemaError("target_scores must carry Yes and No", i);
        }
        const double yes = scores["Yes"].get<double>();
        const double no = scores["No"].get<double>();
        if (yes == no) throw SchemaError("ambiguous target_scores", i);
        r.choices = {{"A", "True"}, {"B", "False"}};
        r.gold = GoldAnswer::choice(yes > no ? "A" : "B");
        r.validate();
        records.push_back(std::move(r));
        ++i;
    }
    return records;
}

std::vector<TaskRecord> load_winogrande(const std::filesystem::path& source) {
    std::vector<TaskRecord> records;
    for_each_jsonl(source, [&](const json& j, std::size_t i) {
        TaskRecord r;
        r.dataset = Dataset::WinoGrande;
        r.answer_type = AnswerType::BinaryChoice;
        r.record_id = j.contains("qID") ? require_string(j, "qID", i) : "dev:" + std::to_string(i);
        r.question = require_string(j, "sentence", i);
        r.choices = {{"1", require_string(j, "option1", i)},
                     {"2", require_string(j, "option2", i)}};
        const std::string answer = require_string(j, "answer", i);
        if (answer != "1" && answer != "2") {
            throw SchemaError("answer must be '1' or '2', got '" + answer + "'", i);
        }
        r.gold = GoldAnswer::choice(answer);
        r.validate();
        records.push_back(std::move(r));
    });
    return records;
}

void expand_race_passage(const json& j, Dataset dataset, std::vector<TaskRecord>& out,
                         std::size_t file_index) {
    const std::string id = require_string(j, "id", file_index);
    for (const char* key : {"questions", "options", "answers"}) {
        if (!j.contains(key) || !j[key].is_array()) {
            throw SchemaError("passage " + id + " lacks array field '" + key + "'", file_index);
        }
    }
    const auto& questions = j["questions"];
    const auto& options = j["options"];
    const auto& answers = j["answers"];
    if (questions.size() != options.size() || questions.size() != answers.size()) {
        throw SchemaError("passage " + id + " has mismatched question/option/answer counts",
                          file_index);
    }
    const std::string article = require_string(j, "article", file_index);
    for (std::size_t q = 0; q < questions.size(); ++q) {
        TaskRecord r;
        r.dataset = dataset;
        r.answer_type = AnswerType::MultipleChoice;
        r.record_id = id + ":" + std::to_string(q);
        r.context = {{"Article", article}};
        r.question = questions[q].get<std::string>();
        if (!options[q].is_array() || options[q].empty()) {
            throw SchemaError("passage " + id + " question " + std::to_string(q) +
                                  " has no options",
                              file_index);
        }
        char label = 'A';
        for (const auto& opt : options[q]) {
            r.choices.emplace_back(std::string(1, label++), opt.get<std::string>());
        }
        r.gold = GoldAnswer::choice(answers[q].get<std::string>());
        r.validate();
        out.push_back(std::move(r));
    }
}

std::vector<TaskRecord> load_race(Dataset dataset, const std::filesystem::path& source) {
    namespace fs = std::filesystem;
    std::vector<TaskRecord> records;
    if (fs::is_directory(source)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(source)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        std::size_t i = 0;
        for (const auto& file : files) {
            expand_race_passage(parse_json(slurp(file), file.string(), i), dataset, records, i);
            ++i;
        }
    } else {
        for_each_jsonl(source, [&](const json& j, std::size_t i) {
            expand_race_passage(j, dataset, records, i);
        });
    }
    return records;
}

std::vector<TaskRecord> load_anli(const std::filesystem::path& source) {
    static const std::string kQuestion =
        "Does the hypothesis imply 'entailment,' 'neutral,' or 'contradiction' in the given "
        "context?";
    std::vector<TaskRecord> records;
    for_each_jsonl(source, [&](const json& j, std::size_t i) {
        TaskRecord r;
        r.dataset = Dataset::Anli;
        r.answer_type = AnswerType::MultipleChoice;
        r.record_id =
            j.contains("uid") ? require_string(j, "uid", i) : "R3-test:" + std::to_string(i);
        r.context = {{"Context", require_string(j, "premise", i)},
                     {"Hypothesis", require_string(j, "hypothesis", i)}};
        r.question = kQuestion;
        r.choices = {{"A", "entailment"}, {"B", "neutral"}, {"C", "contradiction"}};
        const std::string label = require_string(j, "label", i);
        if (label == "e") {
            r.gold = GoldAnswer::choice("A");
        } else if (label == "n") {
            r.gold = GoldAnswer::choice("B");
        } else if (label == "c") {
            r.gold = GoldAnswer::choice("C");
        } else {
            throw SchemaError("label must be e/n/c, got '" + label + "'", i);
        }
        r.validate();
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<TaskRecord> load_triviaqa(const std::filesystem::path& source) {
    const json root = parse_json(slurp(source), source.string(), 0);
    if (!root.contains("Data") || !root["Data"].is_array()) {
        throw SchemaError(source.string() + " has no 'Data' array");
    }
    std::vector<TaskRecord> records;
    std::size_t i = 0;
    for (const auto& item : root["Data"]) {
        TaskRecord r;
        r.dataset = Dataset::TriviaQa;
        r.answer_type = AnswerType::FreeText;
        r.record_id = require_string(item, "QuestionId", i);
        r.question = require_string(item, "Question", i);
        if (!item.contains("Answer") || !item["Answer"].is_object()) {
            throw SchemaError("missing Answer object", i);
        }
        const auto& answer = item["Answer"];
        std::vector<std::string> aliases;
        auto take = [&](const char* key) {
            if (answer.contains(key) && answer[key].is_array()) {
                for (const auto& a : answer[key]) {
                    if (!a.is_string()) continue;
                    const auto trimmed = text::trim(a.get<std::string>());
                    if (!trimmed.empty()) aliases.emplace_back(trimmed);
                }
            }
        };
        take("NormalizedAliases");
        if (aliases.empty()) take("Aliases");
        if (aliases.empty() && answer.contains("Value") && answer["Value"].is_string()) {
            const auto trimmed = text::trim(answer["Value"].get<std::string>());
            if (!trimmed.empty()) aliases.emplace_back(trimmed);
        }
        if (aliases.empty()) throw SchemaError("record has no usable answer aliases", i);
        r.gold = GoldAnswer::text(std::move(aliases));
        r.validate();
        records.push_back(std::move(r));
        ++i;
    }
    return records;
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

ordered_json record_to_json(const TaskRecord& r) {
    ordered_json j;
    j["record_id"] = r.record_id;
    j["dataset"] = dataset_name(r.dataset);
    j["context"] = ordered_json::array();
    for (const auto& [label, body] : r.context) {
        j["context"].push_back(ordered_json{{"label", label}, {"text", body}});
    }
    j["question"] = r.question;
    j["choices"] = ordered_json::array();
    for (const auto& [label, body] : r.choices) {
        j["choices"].push_back(ordered_json{{"label", label}, {"text", body}});
    }
    j["answer_type"] = answer_type_name(r.answer_type);
    ordered_json gold;
    switch (r.gold.kind) {
        case GoldAnswer::Kind::Choice:
            gold["kind"] = "choice";
            gold["label"] = r.gold.choice_label;
            break;
        case GoldAnswer::Kind::Number:
            gold["kind"] = "number";
            gold["value"] = r.gold.number;
            break;
        case GoldAnswer::Kind::Text:
            gold["kind"] = "text";
            gold["aliases"] = r.gold.aliases;
            break;
    }
    j["gold"] = std::move(gold);
    return j;
}

TaskRecord record_from_json(const json& j, std::size_t index) {
    TaskRecord r;
    r.record_id = require_string(j, "record_id", index);
    r.dataset = dataset_from_name(require_string(j, "dataset", index));
    if (j.contains("context")) {
        for (const auto& c : j["context"]) {
            r.context.emplace_back(c.at("label").get<std::string>(),
                                   c.at("text").get<std::string>());
        }
    }
    r.question = require_string(j, "question", index);
    if (j.contains("choices")) {
        for (const auto& c : j["choices"]) {
            r.choices.emplace_back(c.at("label").get<std::string>(),
                                   c.at("text").get<std::string>());
        }
    }
    r.answer_type = answer_type_from_name(require_string(j, "answer_type", index));
    const auto& gold = j.at("gold");
    const std::string kind = gold.at("kind").get<std::string>();
    if (kind == "choice") {
        r.gold = GoldAnswer::choice(gold.at("label").get<std::string>());
    } else if (kind == "number") {
        r.gold = GoldAnswer::number_of(gold.at("value").get<std::string>());
    } else if (kind == "text") {
        r.gold = GoldAnswer::text(gold.at("aliases").get<std::vector<std::string>>());
    } else {
        throw SchemaError("unknown gold kind '" + kind + "'", index);
    }
    r.validate();
    return r;
}

}  // namespace

std::vector<TaskRecord> load_dataset(Dataset dataset, const std::filesystem::path& source,
                                     CountCheck check) {
    std::vector<TaskRecord> records;
    switch (dataset) {
        case Dataset::Aqua: records = load_aqua(source); break;
        case Dataset::Gsm8k: records = load_gsm8k(source); break;
        case Dataset::StrategyQa: records = load_strategyqa(source); break;
        case Dataset::WinoGrande: records = load_winogrande(source); break;
        case Dataset::RaceMiddle: records = load_race(Dataset::RaceMiddle, source); break;
        case Dataset::RaceHigh: records = load_race(Dataset::RaceHigh, source); break;
        case Dataset::Anli: records = load_anli(source); break;
        case Dataset::TriviaQa: records = load_triviaqa(source); break;
    }
    if (check == CountCheck::Enforce && dataset != Dataset::TriviaQa) {
        const auto expected = dataset_expected_count(dataset);
        if (records.size() != expected) {
            throw CountMismatch(std::string(dataset_name(dataset)), expected, records.size());
        }
    }
    return records;
}

DatasetManifestEntry make_manifest_entry(Dataset dataset, const std::filesystem::path& source) {
    DatasetManifestEntry entry;
    entry.dataset = dataset;
    entry.split = std::string(dataset_split(dataset));
    entry.expected_count = dataset_expected_count(dataset);
    entry.fingerprint = fingerprint_path(source);
    return entry;
}

DownsampleResult downsample(const std::vector<TaskRecord>& records, std::size_t n,
                            std::uint64_t seed) {
    if (n > records.size()) throw InsufficientRecords(n, records.size());

    std::vector<std::string> order;
    order.reserve(records.size());
    for (const auto& r : records) order.push_back(r.record_id);
    std::sort(order.begin(), order.end());

    SplitMix64 rng(seed);
    for (std::size_t i = order.size(); i-- > 1;) {
        const auto j = static_cast<std::size_t>(rng.next() % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::set<std::string> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    DownsampleResult out;
    for (const auto& r : records) {
        if (chosen.count(r.record_id)) {
            out.records.push_back(r);
            out.record_ids.push_back(r.record_id);
        }
    }
    return out;
}

std::string build_question_block(const TaskRecord& record) { return format_task(record); }

void write_normalized_records(const std::vector<TaskRecord>& records,
                              const std::filesystem::path& out_file) {
    std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + out_file.string() + " for writing");
    for (const auto& r : records) {
        out << record_to_json(r).dump() << '\n';
    }
}

std::vector<TaskRecord> read_normalized_records(const std::filesystem::path& in_file) {
    std::vector<TaskRecord> records;
    for_each_jsonl(in_file,
                   [&](const json& j, std::size_t i) { records.push_back(record_from_json(j, i)); });
    return records;
}

}  // namespace nulleval
