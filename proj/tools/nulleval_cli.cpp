#include <exception>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nulleval/datasets.hpp"
#include "nulleval/errors.hpp"
#include "nulleval/runner.hpp"
#include "nulleval/version.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 partial run (pending
// records remain), 1 anything else.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

int cmd_validate(const std::string& config_path, bool check_providers) {
    nulleval::RunConfig config;
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    bool has_error = false;
    try {
        config = nulleval::load_run_config(config_path);
    } catch (const nulleval::ConfigError& e) {
        out.push_back({{"severity", "error"}, {"code", "config"}, {"message", e.what()}});
        std::cout << out.dump(2) << '\n';
        return kExitConfig;
    }
    for (const auto& d : nulleval::validate_run(config, check_providers)) {
        out.push_back({{"severity", nulleval::severity_name(d.severity)},
                       {"code", d.code},
                       {"message", d.message}});
        if (d.severity == nulleval::Diagnostic::Severity::Error) has_error = true;
    }
    std::cout << out.dump(2) << '\n';
    return has_error ? kExitConfig : kExitOk;
}

int cmd_run(const std::string& config_path) {
    const auto config = nulleval::load_run_config(config_path);
    const auto outcome = nulleval::run(config);
    std::cout << "manifest: " << outcome.manifest_path.string() << '\n';
    if (outcome.pending > 0) {
        std::cout << outcome.pending << " records pending; resume with:\n  nulleval resume "
                  << outcome.manifest_path.string() << '\n';
        return kExitPartial;
    }
    std::cout << "run complete; report at "
              << (outcome.manifest_path.parent_path() / "report.md").string() << '\n';
    return kExitOk;
}

int cmd_resume(const std::string& manifest_path) {
    const auto outcome = nulleval::resume(manifest_path);
    if (outcome.pending > 0) {
        std::cout << outcome.pending << " records still pending\n";
        return kExitPartial;
    }
    std::cout << "run complete; report at "
              << (outcome.manifest_path.parent_path() / "report.md").string() << '\n';
    return kExitOk;
}

int cmd_report(const std::string& manifest_path) {
    const auto bundle = nulleval::report(manifest_path, /*write_files=*/true);
    std::cout << bundle.markdown;
    return kExitOk;
}

int cmd_sample(const std::string& dataset_name, const std::string& source, std::size_t n,
               std::uint64_t seed, const std::string& out_path) {
    const auto dataset = nulleval::dataset_from_name(dataset_name);
    const auto records =
        nulleval::load_dataset(dataset, source, nulleval::CountCheck::Skip);
    const auto sampled = nulleval::downsample(records, n, seed);
    if (out_path.empty()) {
        for (const auto& id : sampled.record_ids) std::cout << id << '\n';
    } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw nulleval::Error("cannot write " + out_path);
        for (const auto& id : sampled.record_ids) out << id << '\n';
        std::cout << "wrote " << sampled.record_ids.size() << " ids to " << out_path << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prompting-technique evaluation harness"};
    app.set_version_flag("--version", nulleval::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string manifest_path;
    bool check_providers = false;

    auto* validate = app.add_subcommand("validate", "check a run configuration and its inputs");
    validate->add_option("--config", config_path, "run configuration (JSON)")->required();
    validate->add_flag("--check-providers", check_providers, "probe provider endpoints");

    auto* run_cmd = app.add_subcommand("run", "execute a configured run");
    run_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();

    auto* resume_cmd = app.add_subcommand("resume", "continue an interrupted run");
    resume_cmd->add_option("--manifest", manifest_path, "manifest of the run to continue")
        ->required();

    auto* report_cmd = app.add_subcommand("report", "re-render reports for a finished run");
    report_cmd->add_option("--manifest", manifest_path, "manifest of the run")->required();

    std::string sample_dataset = "triviaqa";
    std::string sample_source;
    std::size_t sample_n = 1000;
    std::uint64_t sample_seed = 42;
    std::string sample_out;
    auto* sample_cmd = app.add_subcommand("sample", "emit the seeded record-id sample");
    sample_cmd->add_option("--dataset", sample_dataset, "dataset name");
    sample_cmd->add_option("--source", sample_source, "dataset source path")->required();
    sample_cmd->add_option("--n", sample_n, "sample size");
    sample_cmd->add_option("--seed", sample_seed, "sampler seed");
    sample_cmd->add_option("--out", sample_out, "write ids here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path, check_providers);
        if (run_cmd->parsed()) return cmd_run(config_path);
        if (resume_cmd->parsed()) return cmd_resume(manifest_path);
        if (report_cmd->parsed()) return cmd_report(manifest_path);
        if (sample_cmd->parsed()) {
            return cmd_sample(sample_dataset, sample_source, sample_n, sample_seed, sample_out);
        }
    } catch (const nulleval::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nulleval::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
