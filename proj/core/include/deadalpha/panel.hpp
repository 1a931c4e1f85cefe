#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace deadalpha {

/// Dense per-alpha, per-stock, per-day position tensor.
///
/// Index conventions used throughout the library:
///   - alphas and stocks are sorted ascending (lexicographic),
///   - dates are sorted descending, so day index 0 is the most recent
///     trading date ("today"),
///   - values[s] is the N x M matrix of positions for day s.
///
/// Every (alpha, day) row either has unit L1 norm or is all-zero; all-zero
/// rows mean the alpha did not trade that day and are flagged in
/// `inactive`.
struct PositionPanel {
    std::vector<std::string> alphas;
    std::vector<std::string> stocks;
    std::vector<std::string> dates;
    std::vector<Eigen::MatrixXd> values;           // per day, N x M
    std::vector<std::vector<bool>> inactive;       // per day, N flags

    Eigen::Index n_alphas() const { return static_cast<Eigen::Index>(alphas.size()); }
    Eigen::Index n_stocks() const { return static_cast<Eigen::Index>(stocks.size()); }
    Eigen::Index n_days() const { return static_cast<Eigen::Index>(dates.size()); }

    const Eigen::MatrixXd& day(Eigen::Index s) const { return values.at(static_cast<size_t>(s)); }
};

/// Dense per-stock, per-day realized return matrix. Same ordering
/// conventions as PositionPanel; values is M x T.
struct ReturnPanel {
    std::vector<std::string> stocks;
    std::vector<std::string> dates;
    Eigen::MatrixXd values;          // M x T
    long missing_filled = 0;         // (stock, date) cells zero-filled on load

    Eigen::Index n_stocks() const { return static_cast<Eigen::Index>(stocks.size()); }
    Eigen::Index n_days() const { return static_cast<Eigen::Index>(dates.size()); }
};

/// M x p matrix of linear constraint loadings (e.g. an all-ones column for
/// dollar neutrality). Columns are numerically linearly independent.
struct ConstraintMatrix {
    std::vector<std::string> stocks;
    Eigen::MatrixXd columns;         // M x p

    Eigen::Index n_stocks() const { return static_cast<Eigen::Index>(stocks.size()); }
    Eigen::Index n_constraints() const { return columns.cols(); }
};

}  // namespace deadalpha
