#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deadalpha/panel.hpp"

namespace deadalpha {

/// Eigenvalues below kEigPositivity x (largest eigenvalue) are treated as
/// zero and discarded everywhere in this module.
inline constexpr double kEigPositivity = 1e-12;

enum class RoundingMode { truncate, round };

const char* rounding_mode_name(RoundingMode mode);

/// M x M Gram matrix of dead-alpha positions, X_AB = sum_i P_iA P_iB,
/// optionally averaged over a window of days.
struct GramMatrix {
    std::vector<std::string> stocks;
    Eigen::MatrixXd values;   // symmetric PSD, M x M
    int n_dead = 0;
    int n_days = 1;
};

/// Positive eigenpairs of a Gram matrix: eigenvalues descending, columns of
/// `vectors` unit-norm and sign-fixed (largest-magnitude entry positive,
/// ties resolved toward the lowest stock index).
struct EigenPairs {
    Eigen::VectorXd values;   // L positive eigenvalues, descending
    Eigen::MatrixXd vectors;  // M x L
};

/// Top-K principal components of the dead-alpha Gram matrix.
struct FactorSet {
    std::vector<std::string> stocks;
    Eigen::MatrixXd components;   // M x K, orthonormal columns
    Eigen::VectorXd eigenvalues;  // K positive values, descending
    double erank = 0.0;
    int k = 0;
    RoundingMode rounding_mode = RoundingMode::truncate;
};

/// X_AB = sum_{i in dead} P_iAs P_iBs for one day. Throws ValidationError
/// if the dead set is empty or every selected row is zero on day s.
GramMatrix build_gram(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                      Eigen::Index day);

/// Eq.-(13)-style window average: X = (1/d) sum_{s'=s}^{s+d-1} sum_i outer
/// products. The window starts at day s itself (positions are previsible).
GramMatrix build_averaged_gram(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                               Eigen::Index day, int d);

/// Stacks the (|dead| * d) position rows of the window, each scaled by
/// 1/sqrt(d), so that stacked^T * stacked equals the averaged Gram matrix.
Eigen::MatrixXd stack_dead_rows(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                                Eigen::Index day, int d);

/// exp of the Shannon entropy of the normalized positive eigenvalue
/// spectrum. Eigenvalues at or below the positivity threshold are excluded.
/// Throws ValidationError("zero spectrum") when nothing survives.
double effective_rank(const Eigen::VectorXd& eigenvalues);

/// floor(erank) in truncate mode, round-half-up otherwise; clamped to
/// [1, max_k].
int select_k(double erank, RoundingMode mode, int max_k);

/// All positive eigenpairs of a symmetric PSD Gram matrix, descending, with
/// the deterministic sign convention. Validates symmetry and positive
/// semi-definiteness of the input.
EigenPairs eigendecompose(const GramMatrix& gram);

/// Dual-path eigendecomposition for n < M: eigendecomposes the small n x n
/// matrix B B^T and maps each pair (lambda, u) to (lambda, B^T u / sqrt(lambda)).
/// Matches the direct path on the positive spectrum.
EigenPairs eigendecompose_dual(const Eigen::MatrixXd& stacked_rows);

/// Full extraction for one day: averaged Gram over d days, eigenpairs via
/// the direct or dual path (dual when |dead| * d < M), effective rank, K
/// selection, top-K components.
FactorSet extract_factors(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                          Eigen::Index day, int d, RoundingMode mode);

/// Exports `symbol,v1,...,vK` rows plus a `k,erank,mode,eigenvalues`
/// sidecar (eigenvalues `;`-joined).
void write_factors_csv(const FactorSet& factors, const std::string& factors_path,
                       const std::string& meta_path);

}  // namespace deadalpha
