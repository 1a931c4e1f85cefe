#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deadalpha/factor_extract.hpp"
#include "deadalpha/panel.hpp"

namespace deadalpha {

/// Residual L1 mass below this threshold means the holdings lie entirely in
/// the factor span and cannot be renormalized.
inline constexpr double kSpannedTolerance = 1e-12;

struct Exclusion {
    std::string alpha_id;
    std::string reason;
};

/// Good-alpha holdings projected onto the orthogonal complement of the
/// factor directions and renormalized to unit L1 norm. Alphas whose
/// holdings were fully spanned by the factors are listed in `excluded`
/// rather than zero-filled.
struct NeutralizedHoldings {
    std::vector<std::string> alphas;   // kept alphas, input order
    std::vector<std::string> stocks;
    Eigen::MatrixXd values;            // N_kept x M
    Eigen::VectorXd gammas;            // N_kept positive renormalization factors
    std::vector<Exclusion> excluded;
};

/// For each row p: residual r = p - V (V^T p), gamma = 1 / sum|r|,
/// p~ = gamma * r. Equivalent to the residuals of an intercept-free
/// least-squares regression of p on the columns of V because V is
/// orthonormal. Rows with sum|r| < kSpannedTolerance are excluded and
/// reported.
NeutralizedHoldings neutralize_holdings(const Eigen::MatrixXd& good_positions,
                                        const std::vector<std::string>& alpha_ids,
                                        const FactorSet& factors);

struct DeadAlphasOutput {
    Eigen::MatrixXd stacked;           // (N_kept + K) x M: P~ rows then V^T rows
    NeutralizedHoldings neutralized;
    FactorSet factors;
};

/// End-to-end single-day pipeline: extract factors from the dead alphas
/// over days [day, day + d) and neutralize the good-alpha holdings of
/// `day`. Output rows are the kept neutralized holdings stacked above the
/// K principal components.
DeadAlphasOutput dead_alphas_pipeline(const Eigen::MatrixXd& good_positions,
                                      const std::vector<std::string>& good_ids,
                                      const PositionPanel& dead_panel,
                                      std::span<const Eigen::Index> dead,
                                      Eigen::Index day, int d, RoundingMode mode);

/// neutralized.csv (`alpha_id,symbol,position`), gammas.csv
/// (`alpha_id,gamma`) and excluded.csv (`alpha_id,reason`).
void write_neutralized_csv(const NeutralizedHoldings& holdings,
                           const std::string& neutralized_path,
                           const std::string& gammas_path,
                           const std::string& excluded_path);

}  // namespace deadalpha
