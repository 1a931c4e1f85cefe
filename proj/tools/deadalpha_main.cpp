// deadalpha: extract risk-factor directions from dead (flatlined) alphas'
// position history, neutralize good alphas against them, and assemble a
// simple multifactor risk model. See README.md for the file formats.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "deadalpha/errors.hpp"
#include "deadalpha/pipeline.hpp"
#include "deadalpha/synthetic.hpp"

namespace {

using deadalpha::ExitCode;

int fail(ExitCode code, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json record;
    record["error"] = kind;
    record["message"] = message;
    std::cout << record.dump() << std::endl;
    std::cerr << "deadalpha: " << kind << " error: " << message << std::endl;
    return static_cast<int>(code);
}

const char* error_kind(ExitCode code) {
    switch (code) {
        case ExitCode::config_error: return "config";
        case ExitCode::validation_error: return "validation";
        case ExitCode::numerical_error: return "numerical";
        default: return "internal";
    }
}

struct RunOptions {
    std::string config_path;
    std::optional<int> d;
    std::optional<std::string> mode;
    std::optional<std::string> out_dir;
};

deadalpha::PipelineConfig effective_config(const RunOptions& opt) {
    deadalpha::PipelineConfig cfg = deadalpha::load_config(opt.config_path);
    if (opt.d) cfg.d = *opt.d;
    if (opt.mode) cfg.rounding_mode = deadalpha::parse_rounding_mode(*opt.mode);
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk factors from dead alphas: classification, factor extraction, "
                 "neutralization and a simple risk model"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
    run->add_option("--config", run_opt.config_path, "flat key = value config file")->required();
    run->add_option("--d", run_opt.d, "override the statistics window d");
    run->add_option("--mode", run_opt.mode, "override the eRank rounding mode (trunc|round)");
    run->add_option("--out-dir", run_opt.out_dir, "override the output directory");

    RunOptions classify_opt;
    auto* classify = app.add_subcommand("classify", "compute stats and labels only");
    classify->add_option("--config", classify_opt.config_path, "flat key = value config file")
        ->required();
    classify->add_option("--d", classify_opt.d, "override the statistics window d");
    classify->add_option("--out-dir", classify_opt.out_dir, "override the output directory");

    std::string extract_positions;
    int extract_d = 1;
    std::string extract_mode = "trunc";
    std::string extract_out = ".";
    auto* extract =
        app.add_subcommand("extract", "extract factors from a dead-alpha positions file");
    extract->add_option("--positions", extract_positions, "positions CSV of dead alphas")
        ->required();
    extract->add_option("--d", extract_d, "Gram averaging window (days)")->required();
    extract->add_option("--mode", extract_mode, "eRank rounding mode (trunc|round)");
    extract->add_option("--out-dir", extract_out, "output directory");

    deadalpha::SyntheticSpec spec;
    uint64_t seed = 0;
    std::string synth_out = ".";
    auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic dataset");
    synth->add_option("--n-alphas", spec.n_alphas, "number of alphas");
    synth->add_option("--n-dead", spec.n_dead_target, "number of planted dead alphas");
    synth->add_option("--m-stocks", spec.m_stocks, "number of stocks");
    synth->add_option("--t-days", spec.t_days, "number of trading days");
    synth->add_option("--d", spec.d, "statistics window the dataset is sized for");
    synth->add_option("--signal-decay", spec.signal_decay,
                      "per-day multiplicative signal shrinkage for dead alphas");
    synth->add_option("--noise-scale", spec.noise_scale, "daily return noise scale");
    synth->add_option("--dollar-neutral", spec.dollar_neutral,
                      "generate dollar-neutral positions (true|false)");
    synth->add_option("--seed", seed, "RNG seed")->required();
    synth->add_option("--out-dir", synth_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);   // --help
        app.exit(e);
        return static_cast<int>(ExitCode::config_error);
    }

    try {
        if (run->parsed()) {
            deadalpha::run_pipeline(effective_config(run_opt));
        } else if (classify->parsed()) {
            deadalpha::run_classify(effective_config(classify_opt));
        } else if (extract->parsed()) {
            deadalpha::run_extract(extract_positions, extract_d,
                                   deadalpha::parse_rounding_mode(extract_mode), extract_out);
        } else if (synth->parsed()) {
            deadalpha::write_synthetic(spec, seed, synth_out);
        }
    } catch (const deadalpha::Error& e) {
        return fail(e.code(), error_kind(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(ExitCode::numerical_error, "internal", e.what());
    }
    return 0;
}
