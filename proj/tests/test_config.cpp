#include <doctest.h>

#include "nulleval/config.hpp"
#include "nulleval/errors.hpp"
#include "testutil.hpp"

using namespace nulleval;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
        "datasets": {"gsm8k": "data/gsm8k.jsonl", "triviaqa": "data/triviaqa.json"},
        "techniques": ["zero_shot", "null_shot"],
        "baseline_technique": "zero_shot",
        "providers": [{
            "name": "svc",
            "family": "gpt",
            "base_url": "https://example.test/v1",
            "model": "m-1",
            "mode": "chat",
            "auth_env": "EXAMPLE_KEY",
            "rate_limit_per_min": 30,
            "retry": {"max_attempts": 2, "backoff_ms": [10, 20]}
        }],
        "params": {"temperature": 0.0, "seed": 7, "max_output_tokens": 256, "mode": "chat"},
        "workers": 2,
        "output_dir": "out/run",
        "sample_seed": 42,
        "sample_sizes": {"triviaqa": 500}
    })");
}

}  // namespace

TEST_CASE("config parses every field") {
    const auto config = run_config_from_json(base_config());
    CHECK(config.datasets.size() == 2);
    CHECK(config.datasets.at(Dataset::Gsm8k) == "data/gsm8k.jsonl");
    CHECK(config.techniques ==
          std::vector<Technique>{Technique::ZeroShot, Technique::NullShot});
    CHECK(config.baseline_technique == Technique::ZeroShot);
    REQUIRE(config.providers.size() == 1);
    CHECK(config.providers[0].name == "svc");
    CHECK(config.providers[0].family == "gpt");
    CHECK(config.providers[0].rate_limit_per_min == 30);
    CHECK(config.providers[0].retry.max_attempts == 2);
    CHECK(config.providers[0].retry.backoff_ms == std::vector<int>{10, 20});
    CHECK(config.params.seed == 7);
    CHECK(config.params.max_output_tokens == 256);
    CHECK(config.workers == 2);
    CHECK(config.sample_seed == 42);
    CHECK(config.sample_sizes.at(Dataset::TriviaQa) == 500);
    CHECK_NOTHROW(validate_config(config));
}

TEST_CASE("defaults: seed 42, four workers, seeded triviaqa sample") {
    auto j = base_config();
    j.erase("sample_seed");
    j.erase("sample_sizes");
    j.erase("workers");
    const auto config = run_config_from_json(j);
    CHECK(config.sample_seed == 42);
    CHECK(config.workers == 4);
    // TriviaQA always evaluates on the seeded 1000-record sample.
    CHECK(config.sample_sizes.at(Dataset::TriviaQa) == 1000);
    CHECK(config.params.temperature == 0.0);
}

TEST_CASE("config snapshot round-trips") {
    const auto config = run_config_from_json(base_config());
    const auto snapshot = run_config_to_json(config);
    const auto reparsed = run_config_from_json(snapshot);
    CHECK(run_config_to_json(reparsed) == snapshot);
}

TEST_CASE("invariant violations are config errors") {
    auto j = base_config();
    j["baseline_technique"] = "null_cot";
    CHECK_THROWS_AS((void)validate_config(run_config_from_json(j)), ConfigError);

    j = base_config();
    j["workers"] = 0;
    CHECK_THROWS_AS((void)validate_config(run_config_from_json(j)), ConfigError);

    j = base_config();
    j["techniques"] = json::array({"zero_shot", "zero_shot"});
    CHECK_THROWS_AS((void)validate_config(run_config_from_json(j)), ConfigError);

    j = base_config();
    j["providers"][0].erase("base_url");
    CHECK_THROWS_AS((void)validate_config(run_config_from_json(j)), ConfigError);

    j = base_config();
    j["providers"][0]["rate_limit_per_min"] = 0;
    CHECK_THROWS_AS((void)validate_config(run_config_from_json(j)), ConfigError);

    j = base_config();
    j["output_dir"] = "";
    CHECK_THROWS_AS((void)validate_config(run_config_from_json(j)), ConfigError);
}

TEST_CASE("unknown names are rejected at parse time") {
    auto j = base_config();
    j["techniques"] = json::array({"one_shot"});
    CHECK_THROWS_AS((void)run_config_from_json(j), ConfigError);

    j = base_config();
    j["datasets"] = json{{"mystery", "x"}};
    CHECK_THROWS_AS((void)run_config_from_json(j), ConfigError);

    j = base_config();
    j["providers"][0]["mode"] = "streaming";
    CHECK_THROWS_AS((void)run_config_from_json(j), ConfigError);
}

TEST_CASE("config file loading") {
    testutil::TempDir tmp;
    const auto file = tmp.path / "config.json";
    testutil::write_file(file, base_config().dump(2));
    CHECK_NOTHROW((void)load_run_config(file));
    CHECK_THROWS_AS((void)load_run_config(tmp.path / "missing.json"), ConfigError);
    testutil::write_file(file, "{broken");
    CHECK_THROWS_AS((void)load_run_config(file), ConfigError);
}
