#include "nulleval/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "nulleval/errors.hpp"

namespace nulleval {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ProviderProfile provider_from_json(const json& j) {
    ProviderProfile p;
    p.name = j.at("name").get<std::string>();
    p.family = j.value("family", "");
    p.base_url = j.value("base_url", "");
    p.model = j.value("model", "");
    if (j.contains("mode")) p.mode = provider_mode_from_name(j["mode"].get<std::string>());
    p.auth_env = j.value("auth_env", "");
    p.rate_limit_per_min = j.value("rate_limit_per_min", 60.0);
    p.timeout_s = j.value("timeout_s", 120);
    if (j.contains("retry")) {
        const auto& r = j["retry"];
        p.retry.max_attempts = r.value("max_attempts", 3);
        if (r.contains("backoff_ms")) p.retry.backoff_ms = r["backoff_ms"].get<std::vector<int>>();
    }
    if (j.contains("fixture") && !j["fixture"].is_null()) {
        p.fixture = std::filesystem::path(j["fixture"].get<std::string>());
    }
    if (j.contains("fail_after_calls") && !j["fail_after_calls"].is_null()) {
        p.fail_after_calls = j["fail_after_calls"].get<std::size_t>();
    }
    return p;
}

ordered_json provider_to_json(const ProviderProfile& p) {
    ordered_json j;
    j["name"] = p.name;
    j["family"] = p.family;
    j["base_url"] = p.base_url;
    j["model"] = p.model;
    j["mode"] = provider_mode_name(p.mode);
    j["auth_env"] = p.auth_env;
    j["rate_limit_per_min"] = p.rate_limit_per_min;
    j["timeout_s"] = p.timeout_s;
    j["retry"] = ordered_json{{"max_attempts", p.retry.max_attempts},
                              {"backoff_ms", p.retry.backoff_ms}};
    if (p.fixture) j["fixture"] = p.fixture->string();
    if (p.fail_after_calls) j["fail_after_calls"] = *p.fail_after_calls;
    return j;
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    RunConfig config;
    try {
        if (!j.contains("datasets") || !j["datasets"].is_object() || j["datasets"].empty()) {
            throw ConfigError("config needs a non-empty 'datasets' object (name -> source path)");
        }
        for (const auto& [name, path] : j["datasets"].items()) {
            config.datasets[dataset_from_name(name)] =
                std::filesystem::path(path.get<std::string>());
        }
        if (!j.contains("techniques") || !j["techniques"].is_array()) {
            throw ConfigError("config needs a 'techniques' array");
        }
        for (const auto& t : j["techniques"]) {
            config.techniques.push_back(technique_from_name(t.get<std::string>()));
        }
        if (j.contains("baseline_technique")) {
            config.baseline_technique =
                technique_from_name(j["baseline_technique"].get<std::string>());
        }
        if (!j.contains("providers") || !j["providers"].is_array()) {
            throw ConfigError("config needs a 'providers' array");
        }
        for (const auto& p : j["providers"]) config.providers.push_back(provider_from_json(p));
        if (j.contains("params")) {
            const auto& p = j["params"];
            config.params.temperature = p.value("temperature", 0.0);
            if (p.contains("seed") && !p["seed"].is_null()) {
                config.params.seed = p["seed"].get<std::int64_t>();
            }
            if (p.contains("max_output_tokens") && !p["max_output_tokens"].is_null()) {
                config.params.max_output_tokens = p["max_output_tokens"].get<int>();
            }
            if (p.contains("mode")) {
                config.params.mode = provider_mode_from_name(p["mode"].get<std::string>());
            }
        }
        config.workers = j.value("workers", 4);
        config.output_dir = std::filesystem::path(j.value("output_dir", ""));
        config.sample_seed = j.value("sample_seed", std::uint64_t{42});
        if (j.contains("sample_sizes")) {
            for (const auto& [name, n] : j["sample_sizes"].items()) {
                config.sample_sizes[dataset_from_name(name)] = n.get<std::size_t>();
            }
        }
        if (j.contains("max_records_per_cell") && !j["max_records_per_cell"].is_null()) {
            config.max_records_per_cell = j["max_records_per_cell"].get<std::size_t>();
        }
        if (j.contains("phrase_file") && !j["phrase_file"].is_null()) {
            config.phrase_file = std::filesystem::path(j["phrase_file"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    // The published TriviaQA evaluation always runs on the seeded sample.
    if (config.datasets.count(Dataset::TriviaQa) &&
        !config.sample_sizes.count(Dataset::TriviaQa)) {
        config.sample_sizes[Dataset::TriviaQa] = dataset_expected_count(Dataset::TriviaQa);
    }
    return config;
}

ordered_json run_config_to_json(const RunConfig& config) {
    ordered_json j;
    ordered_json datasets;
    for (const auto& [dataset, path] : config.datasets) {
        datasets[std::string(dataset_name(dataset))] = path.string();
    }
    j["datasets"] = std::move(datasets);
    ordered_json techniques = ordered_json::array();
    for (Technique t : config.techniques) techniques.push_back(technique_name(t));
    j["techniques"] = std::move(techniques);
    j["baseline_technique"] = technique_name(config.baseline_technique);
    ordered_json providers = ordered_json::array();
    for (const auto& p : config.providers) providers.push_back(provider_to_json(p));
    j["providers"] = std::move(providers);
    ordered_json params;
    params["temperature"] = config.params.temperature;
    if (config.params.seed) {
        params["seed"] = *config.params.seed;
    } else {
        params["seed"] = nullptr;
    }
    if (config.params.max_output_tokens) {
        params["max_output_tokens"] = *config.params.max_output_tokens;
    } else {
        params["max_output_tokens"] = nullptr;
    }
    params["mode"] = provider_mode_name(config.params.mode);
    j["params"] = std::move(params);
    j["workers"] = config.workers;
    j["output_dir"] = config.output_dir.string();
    j["sample_seed"] = config.sample_seed;
    ordered_json sizes;
    for (const auto& [dataset, n] : config.sample_sizes) {
        sizes[std::string(dataset_name(dataset))] = n;
    }
    j["sample_sizes"] = std::move(sizes);
    if (config.max_records_per_cell) j["max_records_per_cell"] = *config.max_records_per_cell;
    if (config.phrase_file) j["phrase_file"] = config.phrase_file->string();
    return j;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + file.string() + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(j);
}

void validate_config(const RunConfig& config) {
    if (config.datasets.empty()) throw ConfigError("no datasets configured");
    if (config.techniques.empty()) throw ConfigError("no techniques configured");
    std::set<Technique> seen(config.techniques.begin(), config.techniques.end());
    if (seen.size() != config.techniques.size()) {
        throw ConfigError("duplicate techniques configured");
    }
    if (!seen.count(config.baseline_technique)) {
        throw ConfigError("baseline_technique must be one of the configured techniques");
    }
    if (config.providers.empty()) throw ConfigError("no providers configured");
    for (const auto& p : config.providers) {
        if (p.name.empty()) throw ConfigError("provider without a name");
        if (!p.is_mock() && p.base_url.empty()) {
            throw ConfigError("provider " + p.name + " needs a base_url or a fixture");
        }
        if (p.rate_limit_per_min <= 0) {
            throw ConfigError("provider " + p.name + " must have rate_limit_per_min > 0");
        }
        if (p.retry.max_attempts < 1) {
            throw ConfigError("provider " + p.name + " must allow at least one attempt");
        }
    }
    if (config.workers < 1) throw ConfigError("workers must be >= 1");
    if (config.output_dir.empty()) throw ConfigError("output_dir is required");
}

}  // namespace nulleval
