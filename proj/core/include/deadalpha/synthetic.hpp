#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deadalpha/panel.hpp"

namespace deadalpha {

/// Parameters for the deterministic desk-scale dataset generator.
///
/// Returns are driven by a few planted latent factors plus noise that is
/// constructed orthogonal to a handful of planted "dead" directions, so
/// positions along those directions earn exactly nothing. Dead alphas'
/// predictive signal shrinks multiplicatively (by `signal_decay` per day)
/// while their positions migrate into the dead directions with a small
/// residual negative drift, so their realized returns flatline and the
/// classifier recovers them.
struct SyntheticSpec {
    int n_alphas = 500;
    int n_dead_target = 400;
    int m_stocks = 50;
    int t_days = 60;
    int d = 10;                    // stats window the dataset is sized for
    double signal_decay = 0.85;    // per-day multiplicative signal shrinkage
    double noise_scale = 0.01;     // daily return noise (fraction/day)
    bool dollar_neutral = true;

    /// Throws ConfigError on infeasible parameters (t_days <= 2 d, counts
    /// out of range, decay outside [0, 1]).
    void validate() const;
};

struct SyntheticTruth {
    std::vector<std::string> dead_ids;       // planted dead alphas, sorted
    Eigen::MatrixXd dead_directions;         // M x k, orthonormal, returns-orthogonal
    Eigen::MatrixXd return_factors;          // M x F, orthonormal return drivers
};

struct SyntheticData {
    PositionPanel positions;
    ReturnPanel returns;
    SyntheticTruth truth;
};

/// Deterministic given (spec, seed).
SyntheticData generate_synthetic(const SyntheticSpec& spec, uint64_t seed);

/// Writes positions.csv, returns.csv and synth_manifest.json (spec echo,
/// seed, planted directions, ground-truth dead ids) into `out_dir`.
/// Returns the generated data.
SyntheticData write_synthetic(const SyntheticSpec& spec, uint64_t seed,
                              const std::string& out_dir);

}  // namespace deadalpha
