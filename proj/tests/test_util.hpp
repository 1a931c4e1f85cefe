#pragma once

// Shared fixtures and builders for the unit tests.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deadalpha/panel.hpp"

namespace testutil {

inline std::string padded(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04d", prefix, i);
    return buf;
}

/// Panel from per-day N x M matrices; dates are synthetic labels sorted
/// descending so index 0 is the most recent day.
inline deadalpha::PositionPanel make_panel(std::vector<Eigen::MatrixXd> days) {
    deadalpha::PositionPanel panel;
    const Eigen::Index n = days.at(0).rows();
    const Eigen::Index m = days.at(0).cols();
    const auto t = static_cast<Eigen::Index>(days.size());
    for (Eigen::Index i = 0; i < n; ++i) panel.alphas.push_back(padded("A", static_cast<int>(i)));
    for (Eigen::Index a = 0; a < m; ++a) panel.stocks.push_back(padded("S", static_cast<int>(a)));
    for (Eigen::Index s = 0; s < t; ++s) {
        panel.dates.push_back(padded("d", static_cast<int>(t - 1 - s)));
    }
    panel.inactive.assign(static_cast<size_t>(t),
                          std::vector<bool>(static_cast<size_t>(n), false));
    panel.values = std::move(days);
    return panel;
}

/// Random L1-normalized rows, optionally dollar-neutral.
inline Eigen::MatrixXd random_positions(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng,
                                        bool dollar_neutral = false) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd rows(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index a = 0; a < m; ++a) rows(i, a) = normal(rng);
        if (dollar_neutral) rows.row(i).array() -= rows.row(i).mean();
        rows.row(i) /= rows.row(i).lpNorm<1>();
    }
    return rows;
}

inline deadalpha::PositionPanel random_panel(Eigen::Index n, Eigen::Index m, Eigen::Index t,
                                             std::mt19937_64& rng, bool dollar_neutral = false) {
    std::vector<Eigen::MatrixXd> days;
    for (Eigen::Index s = 0; s < t; ++s) days.push_back(random_positions(n, m, rng, dollar_neutral));
    return make_panel(std::move(days));
}

inline std::vector<Eigen::Index> all_indices(Eigen::Index n) {
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    return idx;
}

/// Random M x K matrix with orthonormal columns.
inline Eigen::MatrixXd random_orthonormal(Eigen::Index m, Eigen::Index k, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd raw(m, k);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) raw(r, c) = normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m, k);
}

/// Copies a panel into the oracle's plain-vector layout.
inline std::vector<std::vector<std::vector<double>>> to_oracle_days(
    const deadalpha::PositionPanel& panel) {
    std::vector<std::vector<std::vector<double>>> days;
    for (const auto& mat : panel.values) {
        std::vector<std::vector<double>> day(static_cast<size_t>(mat.rows()),
                                             std::vector<double>(static_cast<size_t>(mat.cols())));
        for (Eigen::Index i = 0; i < mat.rows(); ++i) {
            for (Eigen::Index a = 0; a < mat.cols(); ++a) {
                day[static_cast<size_t>(i)][static_cast<size_t>(a)] = mat(i, a);
            }
        }
        days.push_back(std::move(day));
    }
    return days;
}

inline std::vector<std::vector<double>> to_oracle_matrix(const Eigen::MatrixXd& mat) {
    std::vector<std::vector<double>> out(static_cast<size_t>(mat.rows()),
                                         std::vector<double>(static_cast<size_t>(mat.cols())));
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            out[static_cast<size_t>(r)][static_cast<size_t>(c)] = mat(r, c);
        }
    }
    return out;
}

/// RAII scratch directory under the system temp dir.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

}  // namespace testutil
