#include "deadalpha/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "deadalpha/errors.hpp"
#include "deadalpha/ingest.hpp"

namespace deadalpha {

namespace {

// Planted structure sizes and scales, relative to spec.noise_scale where
// dimensionful. Recorded in the synth manifest.
constexpr int kReturnFactors = 3;
constexpr int kDeadDirections = 5;
constexpr double kFactorVolMultiple = 2.0;    // factor return vol / noise_scale
constexpr double kPositionNoiseMultiple = 0.3;
constexpr double kDeadDrag = 0.08;            // residual negative drift fraction
constexpr double kDeadJitter = 0.2;           // day-to-day wobble inside the dead span

// Civil-date helpers (Gregorian), so generated dates are real ISO-8601.
long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (static_cast<unsigned>(m) + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, int& m, int& d) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long yy = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

std::string iso_date(long day_number) {
    int y, m, d;
    civil_from_days(day_number, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

std::string padded_id(const char* prefix, int index, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, index);
    return buf;
}

Eigen::VectorXd gaussian_vector(Eigen::Index n, std::mt19937_64& rng,
                                std::normal_distribution<double>& normal) {
    Eigen::VectorXd v(n);
    for (Eigen::Index j = 0; j < n; ++j) v(j) = normal(rng);
    return v;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n_alphas < 1) throw ConfigError("synthetic: n_alphas must be positive");
    if (n_dead_target < 0 || n_dead_target > n_alphas) {
        throw ConfigError("synthetic: n_dead_target must lie in [0, n_alphas]");
    }
    if (m_stocks < kReturnFactors + kDeadDirections + 2) {
        throw ConfigError("synthetic: m_stocks must be at least " +
                          std::to_string(kReturnFactors + kDeadDirections + 2));
    }
    if (d < 2) throw ConfigError("synthetic: d must be >= 2");
    if (t_days <= 2 * d) {
        throw ConfigError("synthetic: t_days (" + std::to_string(t_days) +
                          ") must exceed 2 d = " + std::to_string(2 * d) +
                          " for statistics to be defined");
    }
    if (signal_decay < 0.0 || signal_decay > 1.0) {
        throw ConfigError("synthetic: signal_decay must lie in [0, 1]");
    }
    if (noise_scale <= 0.0) throw ConfigError("synthetic: noise_scale must be positive");
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, uint64_t seed) {
    spec.validate();

    const Eigen::Index n = spec.n_alphas;
    const Eigen::Index m = spec.m_stocks;
    const Eigen::Index t = spec.t_days;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> strength(0.5, 1.5);

    SyntheticData data;
    auto& positions = data.positions;
    auto& returns = data.returns;

    for (int i = 0; i < n; ++i) positions.alphas.push_back(padded_id("A", i, 4));
    for (int a = 0; a < m; ++a) positions.stocks.push_back(padded_id("S", a, 4));

    // Dates descending from a fixed anchor; index 0 is the most recent day.
    const long anchor = days_from_civil(2019, 12, 31);
    for (Eigen::Index s = 0; s < t; ++s) positions.dates.push_back(iso_date(anchor - s));
    returns.stocks = positions.stocks;
    returns.dates = positions.dates;

    // Orthonormal planted directions: the first columns drive returns, the
    // rest span the zero-return subspace the dead alphas migrate into. With
    // dollar-neutral data the whole basis is built inside the complement of
    // the all-ones direction.
    Eigen::MatrixXd raw(m, kReturnFactors + kDeadDirections);
    for (Eigen::Index c = 0; c < raw.cols(); ++c) raw.col(c) = gaussian_vector(m, rng, normal);
    if (spec.dollar_neutral) {
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
        for (Eigen::Index c = 0; c < raw.cols(); ++c) {
            raw.col(c) -= (raw.col(c).sum() / static_cast<double>(m)) * ones;
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd basis =
        qr.householderQ() * Eigen::MatrixXd::Identity(m, kReturnFactors + kDeadDirections);
    const Eigen::MatrixXd factor_dirs = basis.leftCols(kReturnFactors);
    const Eigen::MatrixXd dead_dirs = basis.rightCols(kDeadDirections);

    // Stock returns: factor-driven plus noise constructed orthogonal to the
    // dead directions, so positions inside them earn exactly nothing.
    const double factor_vol = kFactorVolMultiple * spec.noise_scale;
    Eigen::MatrixXd factor_returns(kReturnFactors, t);
    for (Eigen::Index s = 0; s < t; ++s) {
        factor_returns.col(s) = factor_vol * gaussian_vector(kReturnFactors, rng, normal);
    }
    returns.values.resize(m, t);
    for (Eigen::Index s = 0; s < t; ++s) {
        Eigen::VectorXd eps = gaussian_vector(m, rng, normal);
        eps -= dead_dirs * (dead_dirs.transpose() * eps);
        returns.values.col(s) =
            factor_dirs * factor_returns.col(s) + spec.noise_scale * eps;
    }

    // Ground-truth dead subset: a seeded random choice of alphas.
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> is_dead_alpha(static_cast<size_t>(n), false);
    for (int r = 0; r < spec.n_dead_target; ++r) is_dead_alpha[static_cast<size_t>(order[r])] = true;

    std::vector<double> predict_strength(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) predict_strength[static_cast<size_t>(i)] = strength(rng);

    Eigen::MatrixXd dead_coeffs(kDeadDirections, n);   // fixed per-alpha dead bet
    for (Eigen::Index i = 0; i < n; ++i) {
        dead_coeffs.col(i) = gaussian_vector(kDeadDirections, rng, normal);
    }

    const double position_noise = kPositionNoiseMultiple * spec.noise_scale;
    positions.values.assign(static_cast<size_t>(t), Eigen::MatrixXd::Zero(n, m));
    positions.inactive.assign(static_cast<size_t>(t),
                              std::vector<bool>(static_cast<size_t>(n), false));

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a_i = predict_strength[static_cast<size_t>(i)];
        for (Eigen::Index s = 0; s < t; ++s) {
            const Eigen::VectorXd signal_dir = factor_dirs * factor_returns.col(s);
            Eigen::VectorXd raw_pos =
                a_i * signal_dir + position_noise * gaussian_vector(m, rng, normal);
            if (is_dead_alpha[static_cast<size_t>(i)]) {
                // Multiplicative signal shrinkage from the panel start; what
                // remains is a bet inside the zero-return span plus a small
                // negative drift, so realized returns flatline.
                const double age = static_cast<double>(t - 1 - s);
                const double w = std::pow(spec.signal_decay, age);
                Eigen::VectorXd bet =
                    dead_coeffs.col(i) +
                    kDeadJitter * gaussian_vector(kDeadDirections, rng, normal);
                raw_pos = w * raw_pos +
                          (1.0 - w) * (dead_dirs * bet - kDeadDrag * a_i * signal_dir);
            }
            if (spec.dollar_neutral) {
                raw_pos -= (raw_pos.sum() / static_cast<double>(m)) * ones;
            }
            const double l1 = raw_pos.lpNorm<1>();
            positions.values[static_cast<size_t>(s)].row(i) = raw_pos.transpose() / l1;
        }
    }

    auto& truth = data.truth;
    truth.dead_directions = dead_dirs;
    truth.return_factors = factor_dirs;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (is_dead_alpha[static_cast<size_t>(i)]) {
            truth.dead_ids.push_back(positions.alphas[static_cast<size_t>(i)]);
        }
    }
    return data;
}

SyntheticData write_synthetic(const SyntheticSpec& spec, uint64_t seed,
                              const std::string& out_dir) {
    SyntheticData data = generate_synthetic(spec, seed);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    write_positions(data.positions, (dir / "positions.csv").string());
    write_returns(data.returns, (dir / "returns.csv").string());

    nlohmann::ordered_json manifest;
    manifest["command"] = "synth";
    manifest["seed"] = seed;
    manifest["spec"] = {
        {"n_alphas", spec.n_alphas},       {"n_dead_target", spec.n_dead_target},
        {"m_stocks", spec.m_stocks},       {"t_days", spec.t_days},
        {"d", spec.d},                     {"signal_decay", spec.signal_decay},
        {"noise_scale", spec.noise_scale}, {"dollar_neutral", spec.dollar_neutral},
    };
    manifest["generator_constants"] = {
        {"return_factors", kReturnFactors},
        {"dead_directions", kDeadDirections},
        {"factor_vol_multiple", kFactorVolMultiple},
        {"position_noise_multiple", kPositionNoiseMultiple},
        {"dead_drag", kDeadDrag},
        {"dead_jitter", kDeadJitter},
    };
    manifest["dead_alpha_ids"] = data.truth.dead_ids;
    auto matrix_to_json = [](const Eigen::MatrixXd& mat) {
        nlohmann::ordered_json cols = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            nlohmann::ordered_json col = nlohmann::ordered_json::array();
            for (Eigen::Index r = 0; r < mat.rows(); ++r) col.push_back(mat(r, c));
            cols.push_back(std::move(col));
        }
        return cols;
    };
    manifest["planted_dead_directions"] = matrix_to_json(data.truth.dead_directions);
    manifest["planted_return_factors"] = matrix_to_json(data.truth.return_factors);
    manifest["outputs"] = {"positions.csv", "returns.csv"};

    std::ofstream out(dir / "synth_manifest.json", std::ios::binary);
    if (!out) throw ValidationError("cannot open synth manifest for writing");
    out << manifest.dump(2) << "\n";
    return data;
}

}  // namespace deadalpha
