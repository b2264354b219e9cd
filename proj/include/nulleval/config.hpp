#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "nulleval/providers.hpp"
#include "nulleval/types.hpp"

namespace nulleval {

// Full experiment configuration. Loaded from a JSON document; every field
// round-trips through the run manifest so a run can be resumed or audited
// from its manifest alone.
struct RunConfig {
    std::map<Dataset, std::filesystem::path> datasets;  // dataset -> source path
    std::vector<Technique> techniques;
    Technique baseline_technique = Technique::ZeroShot;
    std::vector<ProviderProfile> providers;
    GenerationParams params;
    int workers = 4;
    std::filesystem::path output_dir;
    std::uint64_t sample_seed = 42;
    std::map<Dataset, std::size_t> sample_sizes;  // defaults to triviaqa -> 1000
    std::optional<std::size_t> max_records_per_cell;
    std::optional<std::filesystem::path> phrase_file;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& file);

// Structural invariants: non-empty datasets/techniques/providers, baseline
// among the techniques, workers >= 1, positive rate limits, at least one
// retry attempt. Throws ConfigError.
void validate_config(const RunConfig& config);

}  // namespace nulleval
