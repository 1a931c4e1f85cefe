#include "deadalpha/risk_model.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "csv.hpp"
#include "deadalpha/errors.hpp"

namespace deadalpha {

AugmentedLoadings augment_loadings(const Eigen::MatrixXd& base, const FactorSet& factors) {
    const Eigen::Index m = factors.components.rows();
    if (base.cols() > 0 && base.rows() != m) {
        throw ValidationError("augment_loadings: stock universe mismatch (base has " +
                              std::to_string(base.rows()) + " rows, factors " + std::to_string(m) +
                              ")");
    }

    AugmentedLoadings out;
    out.loadings.resize(m, base.cols() + factors.k);
    if (base.cols() > 0) out.loadings.leftCols(base.cols()) = base;
    out.loadings.rightCols(factors.k) = factors.components;

    for (int a = 0; a < factors.k; ++a) {
        const auto v = factors.components.col(a);
        for (Eigen::Index c = 0; c < base.cols(); ++c) {
            const double denom = base.col(c).norm() * v.norm();
            if (denom == 0.0) continue;
            const double cosine = std::abs(base.col(c).dot(v)) / denom;
            if (cosine > 1.0 - 1e-6) out.duplicates.push_back({c, a, cosine});
        }
    }
    return out;
}

RiskModel assemble_covariance(const Eigen::VectorXd& specific_risk,
                              const Eigen::MatrixXd& loadings,
                              const Eigen::MatrixXd& factor_cov) {
    const Eigen::Index m = specific_risk.size();
    const Eigen::Index f = loadings.cols();
    if (loadings.rows() != m && f > 0) {
        throw ValidationError("assemble_covariance: loadings rows do not match specific risk size");
    }
    for (Eigen::Index a = 0; a < m; ++a) {
        if (!(specific_risk(a) > 0.0)) {
            throw ValidationError("assemble_covariance: nonpositive specific risk at index " +
                                  std::to_string(a) + " (" +
                                  csv::format_double(specific_risk(a)) + ")");
        }
    }
    if (factor_cov.rows() != f || factor_cov.cols() != f) {
        throw ValidationError("assemble_covariance: factor covariance must be " +
                              std::to_string(f) + "x" + std::to_string(f));
    }

    RiskModel model;
    model.specific_risk = specific_risk;
    model.loadings = loadings;
    model.factor_cov = factor_cov;

    if (f > 0) {
        const double scale = std::max(factor_cov.cwiseAbs().maxCoeff(), 1e-300);
        if ((factor_cov - factor_cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw ValidationError("assemble_covariance: factor covariance not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(factor_cov,
                                                              Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("assemble_covariance: factor covariance eigensolver failed");
        }
        const double max_eig = solver.eigenvalues()(f - 1);
        if (solver.eigenvalues()(0) < -1e-10 * std::max(max_eig, 0.0)) {
            throw ValidationError("assemble_covariance: factor covariance not PSD "
                                  "(min eigenvalue " +
                                  csv::format_double(solver.eigenvalues()(0)) + ")");
        }
        Eigen::MatrixXd phi = 0.5 * (factor_cov + factor_cov.transpose());
        Eigen::MatrixXd systematic = loadings * phi * loadings.transpose();
        model.assembled = 0.5 * (systematic + systematic.transpose());
    } else {
        model.assembled = Eigen::MatrixXd::Zero(m, m);
    }
    model.assembled.diagonal() += specific_risk.cwiseProduct(specific_risk);

    Eigen::LLT<Eigen::MatrixXd> llt(model.assembled);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("assemble_covariance: assembled covariance is not positive definite");
    }
    return model;
}

Eigen::VectorXd mean_variance_weights(const RiskModel& model,
                                      const Eigen::VectorXd& expected_stock_returns) {
    const Eigen::Index m = model.assembled.rows();
    if (expected_stock_returns.size() != m) {
        throw ValidationError("mean_variance_weights: expected returns size mismatch");
    }
    if (expected_stock_returns.lpNorm<1>() == 0.0) {
        throw ValidationError("mean_variance_weights: zero expected returns");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.assembled,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("mean_variance_weights: condition estimate failed");
    }
    const double min_eig = solver.eigenvalues()(0);
    const double max_eig = solver.eigenvalues()(m - 1);
    if (min_eig <= 0.0 || max_eig / min_eig > 1e12) {
        const double cond = min_eig > 0.0 ? max_eig / min_eig
                                          : std::numeric_limits<double>::infinity();
        throw NumericalError("mean_variance_weights: covariance ill-conditioned "
                             "(condition estimate " +
                             csv::format_double(cond) + ")");
    }

    Eigen::LLT<Eigen::MatrixXd> llt(model.assembled);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("mean_variance_weights: Cholesky factorization failed");
    }
    Eigen::VectorXd w = llt.solve(expected_stock_returns);
    const double l1 = w.lpNorm<1>();
    if (l1 < 1e-300) {
        throw ValidationError("mean_variance_weights: zero expected returns");
    }
    return w / l1;
}

}  // namespace deadalpha
