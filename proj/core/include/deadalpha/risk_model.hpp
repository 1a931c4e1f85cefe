#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deadalpha/factor_extract.hpp"

namespace deadalpha {

/// Multifactor risk-model covariance
///   Phi_AB = xi_A^2 delta_AB + sum_{mu,nu} Omega_Amu phi_munu Omega_Bnu
/// with xi the specific (idiosyncratic) risk, Omega the factor loadings and
/// phi the factor covariance. Positive definite whenever all xi_A > 0.
struct RiskModel {
    std::vector<std::string> stocks;
    Eigen::VectorXd specific_risk;   // M positive entries
    Eigen::MatrixXd loadings;        // M x F
    Eigen::MatrixXd factor_cov;      // F x F symmetric PSD
    Eigen::MatrixXd assembled;       // M x M
};

struct DuplicateLoading {
    Eigen::Index base_column;
    Eigen::Index factor_index;
    double cosine;                   // |normalized inner product|
};

struct AugmentedLoadings {
    Eigen::MatrixXd loadings;        // M x (F0 + K)
    std::vector<DuplicateLoading> duplicates;
};

/// Appends the factor components as loading columns after `base` (which may
/// have zero columns). A new column whose absolute cosine with an existing
/// column exceeds 1 - 1e-6 is reported as a duplicate direction.
AugmentedLoadings augment_loadings(const Eigen::MatrixXd& base, const FactorSet& factors);

/// Assembles and verifies the covariance. Throws ValidationError for
/// nonpositive specific risk or a non-PSD factor covariance, NumericalError
/// if the result fails Cholesky factorization.
RiskModel assemble_covariance(const Eigen::VectorXd& specific_risk,
                              const Eigen::MatrixXd& loadings,
                              const Eigen::MatrixXd& factor_cov);

/// w = Phi^{-1} e via Cholesky solve (no explicit inverse), L1-normalized
/// with signs preserved. Throws NumericalError when the condition estimate
/// exceeds 1e12 and ValidationError("zero expected returns") when e = 0.
Eigen::VectorXd mean_variance_weights(const RiskModel& model,
                                      const Eigen::VectorXd& expected_stock_returns);

}  // namespace deadalpha
