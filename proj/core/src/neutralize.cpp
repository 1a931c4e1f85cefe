#include "deadalpha/neutralize.hpp"

#include <cmath>

#include "csv.hpp"
#include "deadalpha/errors.hpp"

namespace deadalpha {

NeutralizedHoldings neutralize_holdings(const Eigen::MatrixXd& good_positions,
                                        const std::vector<std::string>& alpha_ids,
                                        const FactorSet& factors) {
    const Eigen::Index n = good_positions.rows();
    const Eigen::Index m = good_positions.cols();
    if (static_cast<size_t>(n) != alpha_ids.size()) {
        throw ValidationError("neutralize_holdings: alpha id count does not match rows");
    }
    const auto& v = factors.components;
    if (v.rows() != m) {
        throw ValidationError("neutralize_holdings: stock universe mismatch (positions have " +
                              std::to_string(m) + " stocks, factors " + std::to_string(v.rows()) +
                              ")");
    }
    const Eigen::MatrixXd gramian = v.transpose() * v;
    const double ortho_defect =
        (gramian - Eigen::MatrixXd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
    if (ortho_defect > 1e-10) {
        throw ValidationError("neutralize_holdings: factor columns not orthonormal (defect " +
                              csv::format_double(ortho_defect) + ")");
    }

    // Residuals of the intercept-free regression of each row on V; with
    // orthonormal V this is the direct projection complement.
    Eigen::MatrixXd residuals = good_positions - (good_positions * v) * v.transpose();

    NeutralizedHoldings out;
    out.stocks = factors.stocks;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double l1 = residuals.row(i).lpNorm<1>();
        if (l1 < kSpannedTolerance) {
            out.excluded.push_back({alpha_ids[static_cast<size_t>(i)],
                                    "fully spanned by dead directions"});
        } else {
            kept.push_back(i);
        }
    }

    out.alphas.reserve(kept.size());
    out.values.resize(static_cast<Eigen::Index>(kept.size()), m);
    out.gammas.resize(static_cast<Eigen::Index>(kept.size()));
    for (size_t r = 0; r < kept.size(); ++r) {
        const Eigen::Index i = kept[r];
        const double gamma = 1.0 / residuals.row(i).lpNorm<1>();
        out.alphas.push_back(alpha_ids[static_cast<size_t>(i)]);
        out.gammas(static_cast<Eigen::Index>(r)) = gamma;
        out.values.row(static_cast<Eigen::Index>(r)) = gamma * residuals.row(i);
    }
    return out;
}

DeadAlphasOutput dead_alphas_pipeline(const Eigen::MatrixXd& good_positions,
                                      const std::vector<std::string>& good_ids,
                                      const PositionPanel& dead_panel,
                                      std::span<const Eigen::Index> dead,
                                      Eigen::Index day, int d, RoundingMode mode) {
    if (good_positions.rows() == 0) throw ValidationError("no good alphas");

    DeadAlphasOutput out;
    out.factors = extract_factors(dead_panel, dead, day, d, mode);
    out.neutralized = neutralize_holdings(good_positions, good_ids, out.factors);

    const Eigen::Index kept = out.neutralized.values.rows();
    out.stacked.resize(kept + out.factors.k, good_positions.cols());
    out.stacked.topRows(kept) = out.neutralized.values;
    out.stacked.bottomRows(out.factors.k) = out.factors.components.transpose();
    return out;
}

void write_neutralized_csv(const NeutralizedHoldings& holdings,
                           const std::string& neutralized_path,
                           const std::string& gammas_path,
                           const std::string& excluded_path) {
    csv::Writer out(neutralized_path);
    out.raw_line("alpha_id,symbol,position");
    for (Eigen::Index i = 0; i < holdings.values.rows(); ++i) {
        for (Eigen::Index a = 0; a < holdings.values.cols(); ++a) {
            out.row({holdings.alphas[static_cast<size_t>(i)],
                     holdings.stocks[static_cast<size_t>(a)],
                     csv::format_double(holdings.values(i, a))});
        }
    }

    csv::Writer gammas(gammas_path);
    gammas.raw_line("alpha_id,gamma");
    for (Eigen::Index i = 0; i < holdings.gammas.size(); ++i) {
        gammas.row({holdings.alphas[static_cast<size_t>(i)],
                    csv::format_double(holdings.gammas(i))});
    }

    csv::Writer excluded(excluded_path);
    excluded.raw_line("alpha_id,reason");
    for (const auto& e : holdings.excluded) excluded.row({e.alpha_id, e.reason});
}

}  // namespace deadalpha
