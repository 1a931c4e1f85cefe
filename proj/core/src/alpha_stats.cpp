#include "deadalpha/alpha_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csv.hpp"
#include "deadalpha/errors.hpp"

namespace deadalpha {

void ClassificationConfig::validate() const {
    if (d < 2) throw ConfigError("classification window d must be >= 2, got " + std::to_string(d));
    if (d_vol != 0 && d_vol < 2) {
        throw ConfigError("volatility window d_vol must be >= 2, got " + std::to_string(d_vol));
    }
    if (eta_dead > eta_min) {
        throw ConfigError("eta_dead (" + csv::format_double(eta_dead) +
                          ") must not exceed eta_min (" + csv::format_double(eta_min) + ")");
    }
    if (s_dead > s_min) {
        throw ConfigError("s_dead (" + csv::format_double(s_dead) + ") must not exceed s_min (" +
                          csv::format_double(s_min) + ")");
    }
}

const char* label_name(Label label) {
    switch (label) {
        case Label::dead: return "dead";
        case Label::good: return "good";
        case Label::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Eigen::MatrixXd realized_returns(const PositionPanel& positions, const ReturnPanel& returns) {
    // Align the (possibly larger) return universe onto the panel's.
    std::vector<Eigen::Index> stock_map(static_cast<size_t>(positions.n_stocks()));
    for (Eigen::Index a = 0; a < positions.n_stocks(); ++a) {
        const auto& symbol = positions.stocks[static_cast<size_t>(a)];
        auto it = std::lower_bound(returns.stocks.begin(), returns.stocks.end(), symbol);
        if (it == returns.stocks.end() || *it != symbol) {
            throw ValidationError("realized_returns: stock " + symbol + " missing from returns");
        }
        stock_map[static_cast<size_t>(a)] = it - returns.stocks.begin();
    }
    std::vector<Eigen::Index> date_map(static_cast<size_t>(positions.n_days()));
    for (Eigen::Index s = 0; s < positions.n_days(); ++s) {
        const auto& date = positions.dates[static_cast<size_t>(s)];
        auto it = std::lower_bound(returns.dates.begin(), returns.dates.end(), date,
                                   [](const std::string& a, const std::string& b) { return a > b; });
        if (it == returns.dates.end() || *it != date) {
            throw ValidationError("realized_returns: date " + date + " missing from returns");
        }
        date_map[static_cast<size_t>(s)] = it - returns.dates.begin();
    }

    Eigen::MatrixXd rho(positions.n_alphas(), positions.n_days());
    Eigen::VectorXd day_returns(positions.n_stocks());
    for (Eigen::Index s = 0; s < positions.n_days(); ++s) {
        for (Eigen::Index a = 0; a < positions.n_stocks(); ++a) {
            day_returns(a) = returns.values(stock_map[static_cast<size_t>(a)],
                                            date_map[static_cast<size_t>(s)]);
        }
        rho.col(s) = positions.values[static_cast<size_t>(s)] * day_returns;
    }
    return rho;
}

Eigen::MatrixXd expected_returns(const Eigen::MatrixXd& realized, int d) {
    if (d < 1) throw ConfigError("expected-return window d must be >= 1");
    const Eigen::Index t = realized.cols();
    if (t <= d) {
        throw ValidationError("insufficient history: need more than d = " + std::to_string(d) +
                              " days, got " + std::to_string(t));
    }
    // eta at day s averages the d strictly prior days s+1 .. s+d (older).
    Eigen::MatrixXd eta(realized.rows(), t - d);
    for (Eigen::Index s = 0; s < t - d; ++s) {
        eta.col(s) = realized.middleCols(s + 1, d).rowwise().mean();
    }
    return eta;
}

MovingVolatility moving_volatility(const Eigen::MatrixXd& expected, int d) {
    if (d < 2) throw ConfigError("volatility window d must be >= 2 (serial variance divides by d-1)");
    const Eigen::Index t = expected.cols();
    if (t <= d) {
        throw ValidationError("insufficient history for volatility: need more than d = " +
                              std::to_string(d) + " expected-return days, got " +
                              std::to_string(t));
    }
    MovingVolatility out;
    out.sigma.resize(expected.rows(), t - d);
    out.window_mean.resize(expected.rows(), t - d);
    for (Eigen::Index s = 0; s < t - d; ++s) {
        auto window = expected.middleCols(s + 1, d);
        out.window_mean.col(s) = window.rowwise().mean();
        out.sigma.col(s) = ((window.colwise() - out.window_mean.col(s)).rowwise().squaredNorm() /
                            static_cast<double>(d - 1))
                               .cwiseSqrt();
    }
    return out;
}

double sharpe_value(double eta, double sigma) {
    if (sigma == 0.0) {
        if (eta > 0.0) return std::numeric_limits<double>::infinity();
        if (eta < 0.0) return -std::numeric_limits<double>::infinity();
        return 0.0;
    }
    return eta / sigma;
}

bool is_dead(double eta, double sharpe, const ClassificationConfig& cfg) {
    return eta < cfg.eta_dead && sharpe < cfg.s_dead;
}

bool is_good(double eta, double sharpe, const ClassificationConfig& cfg) {
    return eta >= cfg.eta_min && sharpe >= cfg.s_min;
}

AlphaStats compute_alpha_stats(const PositionPanel& positions, const ReturnPanel& returns,
                               const ClassificationConfig& cfg) {
    cfg.validate();
    AlphaStats stats;
    stats.alphas = positions.alphas;
    stats.dates = positions.dates;
    stats.d_expected = cfg.d;
    stats.d_vol = cfg.effective_d_vol();
    stats.realized = realized_returns(positions, returns);
    stats.expected = expected_returns(stats.realized, cfg.d);
    auto vol = moving_volatility(stats.expected, stats.d_vol);
    stats.volatility = std::move(vol.sigma);
    stats.window_mean = std::move(vol.window_mean);
    return stats;
}

LabelMatrix classify(const AlphaStats& stats, const ClassificationConfig& cfg) {
    cfg.validate();
    LabelMatrix labels;
    labels.alphas = stats.alphas;
    labels.rows = stats.volatility.rows();
    labels.cols = stats.volatility.cols();
    labels.dates.assign(stats.dates.begin(), stats.dates.begin() + labels.cols);
    labels.data.assign(static_cast<size_t>(labels.rows * labels.cols), Label::indeterminate);
    for (Eigen::Index i = 0; i < labels.rows; ++i) {
        for (Eigen::Index s = 0; s < labels.cols; ++s) {
            const double eta = stats.expected(i, s);
            const double sharpe = sharpe_value(eta, stats.volatility(i, s));
            Label label = Label::indeterminate;
            if (is_dead(eta, sharpe, cfg)) {
                label = Label::dead;
            } else if (is_good(eta, sharpe, cfg)) {
                label = Label::good;
            }
            labels.data[static_cast<size_t>(i * labels.cols + s)] = label;
        }
    }
    return labels;
}

void write_stats_csv(const AlphaStats& stats, const LabelMatrix& labels, const std::string& path) {
    csv::Writer out(path);
    out.raw_line("date,alpha_id,realized,expected,volatility,sharpe,label");
    const Eigen::Index n = stats.realized.rows();
    const Eigen::Index t = stats.realized.cols();
    for (Eigen::Index s = 0; s < t; ++s) {
        for (Eigen::Index i = 0; i < n; ++i) {
            std::vector<std::string> fields(7);
            fields[0] = stats.dates[static_cast<size_t>(s)];
            fields[1] = stats.alphas[static_cast<size_t>(i)];
            fields[2] = csv::format_double(stats.realized(i, s));
            if (s < stats.expected.cols()) fields[3] = csv::format_double(stats.expected(i, s));
            if (s < stats.volatility.cols()) {
                const double sigma = stats.volatility(i, s);
                fields[4] = csv::format_double(sigma);
                fields[5] = csv::format_double(sharpe_value(stats.expected(i, s), sigma));
            }
            if (s < labels.cols && i < labels.rows) fields[6] = label_name(labels(i, s));
            out.row(fields);
        }
    }
}

}  // namespace deadalpha
