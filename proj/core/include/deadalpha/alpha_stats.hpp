#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deadalpha/panel.hpp"

namespace deadalpha {

/// Per-alpha return statistics. Column c of every matrix refers to date
/// index c of `dates` (0 = most recent); later-defined statistics simply
/// have fewer columns. With an expected-return window d and a volatility
/// window dv:
///   realized    N x T      rho_is = sum_A P_iAs R_As
///   expected    N x (T-d)  eta_is, mean of rho over the d strictly prior days
///   window_mean N x (T-d-dv)
///   volatility  N x (T-d-dv)  serial stddev of eta over the dv prior days
struct AlphaStats {
    std::vector<std::string> alphas;
    std::vector<std::string> dates;
    Eigen::MatrixXd realized;
    Eigen::MatrixXd expected;
    Eigen::MatrixXd window_mean;
    Eigen::MatrixXd volatility;
    int d_expected = 0;
    int d_vol = 0;
};

struct ClassificationConfig {
    int d = 10;          // expected-return window (trading days)
    int d_vol = 0;       // volatility window; 0 means "same as d"
    double eta_min = 0.0;
    double eta_dead = 0.0;
    double s_min = 0.0;
    double s_dead = 0.0;

    int effective_d_vol() const { return d_vol > 0 ? d_vol : d; }

    /// Enforces d >= 2, d_vol >= 2 (when set), eta_dead <= eta_min and
    /// s_dead <= s_min. Throws ConfigError.
    void validate() const;
};

enum class Label : int { indeterminate = 0, dead = 1, good = 2 };

const char* label_name(Label label);

/// Per-(alpha, day) labels; defined where both eta and sigma exist.
struct LabelMatrix {
    std::vector<std::string> alphas;
    std::vector<std::string> dates;   // prefix of the panel dates
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<Label> data;          // row-major

    Label operator()(Eigen::Index i, Eigen::Index s) const {
        return data[static_cast<size_t>(i * cols + s)];
    }
};

/// rho_is = sum_A P_iAs R_As. The return panel's stock and date sets must
/// cover the position panel's (supersets allowed); otherwise an index error
/// (ValidationError) is thrown.
Eigen::MatrixXd realized_returns(const PositionPanel& positions, const ReturnPanel& returns);

/// eta_is = (1/d) sum_{s'=s+1}^{s+d} rho_is' over the d strictly prior days
/// (day s itself excluded). Requires T > d.
Eigen::MatrixXd expected_returns(const Eigen::MatrixXd& realized, int d);

struct MovingVolatility {
    Eigen::MatrixXd sigma;        // nonnegative serial stddev
    Eigen::MatrixXd window_mean;  // plain mean over the same window
};

/// sigma^2_is = (1/(d-1)) sum_{s'=s+1}^{s+d} (eta_is' - etabar_is)^2 with
/// etabar the mean over the same window. Requires d >= 2 and enough history.
MovingVolatility moving_volatility(const Eigen::MatrixXd& expected, int d);

/// Sharpe with the sigma = 0 convention: +inf for eta > 0, -inf for
/// eta < 0, and 0 for eta = 0.
double sharpe_value(double eta, double sigma);

bool is_dead(double eta, double sharpe, const ClassificationConfig& cfg);
bool is_good(double eta, double sharpe, const ClassificationConfig& cfg);

/// Convenience: realized -> expected -> volatility with the config windows.
AlphaStats compute_alpha_stats(const PositionPanel& positions, const ReturnPanel& returns,
                               const ClassificationConfig& cfg);

/// dead iff eta < eta_dead and sharpe < s_dead; good iff eta >= eta_min and
/// sharpe >= s_min; otherwise indeterminate.
LabelMatrix classify(const AlphaStats& stats, const ClassificationConfig& cfg);

/// Exports `date,alpha_id,realized,expected,volatility,sharpe,label` rows
/// for every (date, alpha); fields that are undefined at that date are
/// left empty.
void write_stats_csv(const AlphaStats& stats, const LabelMatrix& labels, const std::string& path);

}  // namespace deadalpha
