#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deadalpha/alpha_stats.hpp"
#include "deadalpha/factor_extract.hpp"
#include "deadalpha/neutralize.hpp"
#include "deadalpha/panel.hpp"
#include "deadalpha/risk_model.hpp"

namespace deadalpha {

enum class FactorCovMode { eigenvalues, identity, file };

const char* factor_cov_mode_name(FactorCovMode mode);

/// Accepts "trunc", "truncate" or "round"; throws ConfigError otherwise.
RoundingMode parse_rounding_mode(const std::string& value);

/// Full configuration for one pipeline run. Loaded from a flat
/// `key = value` file (`#` comments) and/or overridden by CLI flags.
struct PipelineConfig {
    std::string positions_path;
    std::string returns_path;
    std::string constraints_path;     // optional
    std::string out_dir = ".";

    int d = 10;
    int d_vol = 0;       // 0 = same as d
    int d_gram = 0;      // 0 = same as d
    double eta_min = 0.0;
    double eta_dead = 0.0;
    double s_min = 0.0;
    double s_dead = 0.0;
    RoundingMode rounding_mode = RoundingMode::truncate;
    std::optional<uint64_t> seed;     // used by config-driven synthesis

    // Named tolerance overrides (config keys `tol_<name>`).
    double tol_l1 = 1e-8;             // ingest L1 validation
    double tol_constraint = 1e-8;     // check_constraints flag threshold

    // Optional risk-model stage.
    bool risk_model = false;
    double specific_risk_scale = 1.0;
    FactorCovMode factor_cov_mode = FactorCovMode::eigenvalues;
    std::string factor_cov_path;      // required for FactorCovMode::file

    std::map<std::string, double> tolerance_overrides;

    /// Threshold ordering, window sanity and mode checks. Throws
    /// ConfigError; performs no I/O.
    void validate() const;
};

/// Parses the flat key = value config file. Unknown keys are a ConfigError.
PipelineConfig load_config(const std::string& path);

ClassificationConfig classification_config(const PipelineConfig& cfg);

struct RunCounts {
    Eigen::Index n_alphas = 0;
    Eigen::Index n_dead = 0;
    Eigen::Index n_good = 0;
    Eigen::Index n_excluded = 0;
    Eigen::Index m_stocks = 0;
    Eigen::Index t_days = 0;
    int k = 0;
    double erank = 0.0;
};

struct PipelineResult {
    AlphaStats stats;
    LabelMatrix labels;
    std::vector<std::string> dead_ids;
    std::vector<std::string> good_ids;
    DeadAlphasOutput output;
    RunCounts counts;
    std::optional<Eigen::VectorXd> weights;          // risk-model stage only
    std::optional<Eigen::VectorXd> factor_exposures; // V^T w
};

/// Loads the panels, computes statistics, classifies at the most recent
/// date, extracts factors from the dead set over d_gram days, neutralizes
/// the good holdings and writes stats.csv, neutralized.csv, gammas.csv,
/// excluded.csv, factors.csv, factor_meta.csv and manifest.json into
/// cfg.out_dir. With cfg.risk_model set, also assembles the covariance and
/// writes weights.csv and exposures.csv.
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// classify subcommand body: stats + labels only (stats.csv, manifest.json).
PipelineResult run_classify(const PipelineConfig& cfg);

/// extract subcommand body: treats every alpha in the positions file as
/// dead and writes factors.csv, factor_meta.csv and manifest.json.
FactorSet run_extract(const std::string& positions_path, int d, RoundingMode mode,
                      const std::string& out_dir, double tol_l1 = 1e-8);

}  // namespace deadalpha
