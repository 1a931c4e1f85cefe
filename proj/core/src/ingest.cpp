#include "deadalpha/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include <Eigen/SVD>

#include "csv.hpp"
#include "deadalpha/errors.hpp"

namespace deadalpha {

namespace {

// Sorted-unique index over string keys; dates use descending order so that
// day index 0 is the most recent date.
std::vector<std::string> sorted_unique(std::set<std::string>& keys, bool descending) {
    std::vector<std::string> out(keys.begin(), keys.end());
    if (descending) std::reverse(out.begin(), out.end());
    return out;
}

Eigen::Index index_of(const std::vector<std::string>& sorted_asc, const std::string& key) {
    auto it = std::lower_bound(sorted_asc.begin(), sorted_asc.end(), key);
    return static_cast<Eigen::Index>(it - sorted_asc.begin());
}

Eigen::Index date_index(const std::vector<std::string>& sorted_desc, const std::string& key) {
    auto it = std::lower_bound(sorted_desc.begin(), sorted_desc.end(), key,
                               [](const std::string& a, const std::string& b) { return a > b; });
    return static_cast<Eigen::Index>(it - sorted_desc.begin());
}

}  // namespace

PositionPanel load_positions(const std::string& path, double l1_tol) {
    const auto rows = csv::read_rows(path, "date,alpha_id,symbol,position");

    std::set<std::string> alpha_keys, stock_keys, date_keys;
    for (const auto& row : rows) {
        date_keys.insert(row.fields[0]);
        alpha_keys.insert(row.fields[1]);
        stock_keys.insert(row.fields[2]);
    }

    PositionPanel panel;
    panel.alphas = sorted_unique(alpha_keys, false);
    panel.stocks = sorted_unique(stock_keys, false);
    panel.dates = sorted_unique(date_keys, true);

    const Eigen::Index n = panel.n_alphas();
    const Eigen::Index m = panel.n_stocks();
    const Eigen::Index t = panel.n_days();
    panel.values.assign(static_cast<size_t>(t), Eigen::MatrixXd::Zero(n, m));

    std::vector<uint8_t> seen(static_cast<size_t>(n * m * t), 0);
    for (const auto& row : rows) {
        const Eigen::Index s = date_index(panel.dates, row.fields[0]);
        const Eigen::Index i = index_of(panel.alphas, row.fields[1]);
        const Eigen::Index a = index_of(panel.stocks, row.fields[2]);
        const double value = csv::parse_double(row.fields[3], row.line);
        if (!std::isfinite(value)) {
            throw ValidationError(path + " line " + std::to_string(row.line) +
                                  ": non-finite position");
        }
        auto& flag = seen[static_cast<size_t>((s * n + i) * m + a)];
        if (flag) {
            throw ValidationError(path + " line " + std::to_string(row.line) +
                                  ": duplicate (alpha, stock, date) entry " + row.fields[1] + "/" +
                                  row.fields[2] + "/" + row.fields[0]);
        }
        flag = 1;
        panel.values[static_cast<size_t>(s)](i, a) = value;
    }

    panel.inactive.assign(static_cast<size_t>(t), std::vector<bool>(static_cast<size_t>(n), false));
    for (Eigen::Index s = 0; s < t; ++s) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double l1 = panel.values[static_cast<size_t>(s)].row(i).lpNorm<1>();
            if (l1 == 0.0) {
                panel.inactive[static_cast<size_t>(s)][static_cast<size_t>(i)] = true;
            } else if (std::abs(l1 - 1.0) > l1_tol) {
                throw ValidationError(path + ": L1 normalization violated for alpha " +
                                      panel.alphas[static_cast<size_t>(i)] + " on " +
                                      panel.dates[static_cast<size_t>(s)] + " (sum |P| = " +
                                      csv::format_double(l1) + ")");
            }
        }
    }
    return panel;
}

ReturnPanel load_returns(const std::string& path) {
    const auto rows = csv::read_rows(path, "date,symbol,return");

    std::set<std::string> stock_keys, date_keys;
    for (const auto& row : rows) {
        date_keys.insert(row.fields[0]);
        stock_keys.insert(row.fields[1]);
    }

    ReturnPanel panel;
    panel.stocks = sorted_unique(stock_keys, false);
    panel.dates = sorted_unique(date_keys, true);

    const Eigen::Index m = panel.n_stocks();
    const Eigen::Index t = panel.n_days();
    panel.values = Eigen::MatrixXd::Zero(m, t);

    std::vector<uint8_t> seen(static_cast<size_t>(m * t), 0);
    long filled = 0;
    for (const auto& row : rows) {
        const Eigen::Index s = date_index(panel.dates, row.fields[0]);
        const Eigen::Index a = index_of(panel.stocks, row.fields[1]);
        const double value = csv::parse_double(row.fields[2], row.line);
        if (!std::isfinite(value)) {
            throw ValidationError(path + " line " + std::to_string(row.line) +
                                  ": non-finite return for " + row.fields[1] + " on " +
                                  row.fields[0]);
        }
        auto& flag = seen[static_cast<size_t>(s * m + a)];
        if (flag) {
            throw ValidationError(path + " line " + std::to_string(row.line) +
                                  ": duplicate (stock, date) entry " + row.fields[1] + "/" +
                                  row.fields[0]);
        }
        flag = 1;
        panel.values(a, s) = value;
        ++filled;
    }
    panel.missing_filled = static_cast<long>(m * t) - filled;
    return panel;
}

ConstraintMatrix load_constraints(const std::string& path) {
    std::vector<std::string> header;
    const auto rows = csv::read_rows_variable(path, "symbol", header);
    const auto p = static_cast<Eigen::Index>(header.size()) - 1;
    if (p < 1) throw ValidationError(path + ": no constraint columns");

    std::map<std::string, std::vector<double>> by_symbol;
    for (const auto& row : rows) {
        if (by_symbol.count(row.fields[0])) {
            throw ValidationError(path + " line " + std::to_string(row.line) +
                                  ": duplicate symbol " + row.fields[0]);
        }
        std::vector<double> values;
        values.reserve(static_cast<size_t>(p));
        for (Eigen::Index c = 0; c < p; ++c) {
            const double v = csv::parse_double(row.fields[static_cast<size_t>(c) + 1], row.line);
            if (!std::isfinite(v)) {
                throw ValidationError(path + " line " + std::to_string(row.line) +
                                      ": non-finite constraint loading");
            }
            values.push_back(v);
        }
        by_symbol.emplace(row.fields[0], std::move(values));
    }

    ConstraintMatrix q;
    const auto m = static_cast<Eigen::Index>(by_symbol.size());
    if (p >= m) {
        throw ValidationError(path + ": " + std::to_string(p) + " constraints for " +
                              std::to_string(m) + " stocks (need p < M)");
    }
    q.columns.resize(m, p);
    Eigen::Index a = 0;
    for (const auto& [symbol, values] : by_symbol) {
        q.stocks.push_back(symbol);
        for (Eigen::Index c = 0; c < p; ++c) q.columns(a, c) = values[static_cast<size_t>(c)];
        ++a;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q.columns);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
        throw ValidationError(path + ": constraint columns are not linearly independent "
                              "(singular value ratio " +
                              csv::format_double(sv(sv.size() - 1) / sv(0)) + ")");
    }
    return q;
}

void write_positions(const PositionPanel& panel, const std::string& path) {
    csv::Writer out(path);
    out.raw_line("date,alpha_id,symbol,position");
    for (Eigen::Index s = 0; s < panel.n_days(); ++s) {
        const auto& day = panel.values[static_cast<size_t>(s)];
        for (Eigen::Index i = 0; i < panel.n_alphas(); ++i) {
            for (Eigen::Index a = 0; a < panel.n_stocks(); ++a) {
                const double v = day(i, a);
                if (v == 0.0) continue;
                out.row({panel.dates[static_cast<size_t>(s)], panel.alphas[static_cast<size_t>(i)],
                         panel.stocks[static_cast<size_t>(a)], csv::format_double(v)});
            }
        }
    }
}

void write_returns(const ReturnPanel& panel, const std::string& path) {
    csv::Writer out(path);
    out.raw_line("date,symbol,return");
    for (Eigen::Index s = 0; s < panel.n_days(); ++s) {
        for (Eigen::Index a = 0; a < panel.n_stocks(); ++a) {
            out.row({panel.dates[static_cast<size_t>(s)], panel.stocks[static_cast<size_t>(a)],
                     csv::format_double(panel.values(a, s))});
        }
    }
}

ConstraintReport check_constraints(const PositionPanel& panel, const ConstraintMatrix& q,
                                   double tol) {
    if (panel.stocks != q.stocks) {
        throw ValidationError("check_constraints: stock universe mismatch between panel and "
                              "constraint matrix");
    }
    ConstraintReport report;
    report.values.reserve(static_cast<size_t>(panel.n_days()));
    for (Eigen::Index s = 0; s < panel.n_days(); ++s) {
        Eigen::MatrixXd exposure =
            (panel.values[static_cast<size_t>(s)] * q.columns).cwiseAbs();
        for (Eigen::Index i = 0; i < exposure.rows(); ++i) {
            for (Eigen::Index c = 0; c < exposure.cols(); ++c) {
                if (exposure(i, c) > tol) {
                    report.flagged.push_back({i, s, c, exposure(i, c)});
                }
            }
        }
        report.values.push_back(std::move(exposure));
    }
    return report;
}

}  // namespace deadalpha
