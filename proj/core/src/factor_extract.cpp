#include "deadalpha/factor_extract.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "csv.hpp"
#include "deadalpha/errors.hpp"

namespace deadalpha {

namespace {

// Largest-magnitude entry positive; ties resolved toward the lowest index.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index best = 0;
    double best_abs = std::abs(v(0));
    for (Eigen::Index j = 1; j < v.size(); ++j) {
        const double a = std::abs(v(j));
        if (a > best_abs) {
            best_abs = a;
            best = j;
        }
    }
    if (v(best) < 0.0) v = -v;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a(j) != b(j)) return a(j) < b(j);
    }
    return false;
}

// Shared tail of both eigendecomposition paths: filter the positive
// spectrum, order descending (exact ties by sign-fixed lexicographic
// eigenvector order) and apply the sign convention.
EigenPairs finalize_pairs(const Eigen::VectorXd& values, Eigen::MatrixXd vectors,
                          const char* context) {
    const double max_eig = values.size() > 0 ? values.maxCoeff() : 0.0;
    const double threshold = kEigPositivity * max_eig;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        if (values(j) > threshold && values(j) > 0.0) keep.push_back(j);
    }
    if (keep.empty()) throw ValidationError(std::string(context) + ": zero spectrum");

    for (Eigen::Index j : keep) fix_sign(vectors.col(j));
    std::sort(keep.begin(), keep.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values(a) != values(b)) return values(a) > values(b);
        return lex_less(vectors.col(a), vectors.col(b));
    });

    EigenPairs pairs;
    pairs.values.resize(static_cast<Eigen::Index>(keep.size()));
    pairs.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(keep.size()));
    for (size_t r = 0; r < keep.size(); ++r) {
        pairs.values(static_cast<Eigen::Index>(r)) = values(keep[r]);
        pairs.vectors.col(static_cast<Eigen::Index>(r)) = vectors.col(keep[r]);
    }
    return pairs;
}

void require_nonempty_dead(std::span<const Eigen::Index> dead) {
    if (dead.empty()) throw ValidationError("no dead alphas");
}

void require_window(const PositionPanel& panel, Eigen::Index day, int d) {
    if (d < 1) throw ConfigError("gram window d must be >= 1");
    if (day < 0 || day + d > panel.n_days()) {
        throw ValidationError("insufficient days in panel: window [" + std::to_string(day) + ", " +
                              std::to_string(day + d) + ") exceeds " +
                              std::to_string(panel.n_days()) + " days");
    }
}

bool window_has_nonzero_row(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                            Eigen::Index day, int d) {
    for (Eigen::Index s = day; s < day + d; ++s) {
        const auto& mat = panel.values[static_cast<size_t>(s)];
        for (Eigen::Index i : dead) {
            if (mat.row(i).lpNorm<1>() > 0.0) return true;
        }
    }
    return false;
}

}  // namespace

const char* rounding_mode_name(RoundingMode mode) {
    return mode == RoundingMode::truncate ? "truncate" : "round";
}

GramMatrix build_gram(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                      Eigen::Index day) {
    return build_averaged_gram(panel, dead, day, 1);
}

GramMatrix build_averaged_gram(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                               Eigen::Index day, int d) {
    require_nonempty_dead(dead);
    require_window(panel, day, d);
    if (!window_has_nonzero_row(panel, dead, day, d)) {
        throw ValidationError("no dead alphas with nonzero positions in the window");
    }

    const Eigen::Index m = panel.n_stocks();
    GramMatrix gram;
    gram.stocks = panel.stocks;
    gram.n_dead = static_cast<int>(dead.size());
    gram.n_days = d;
    gram.values = Eigen::MatrixXd::Zero(m, m);

    Eigen::MatrixXd rows(static_cast<Eigen::Index>(dead.size()), m);
    auto lower = gram.values.selfadjointView<Eigen::Lower>();
    for (Eigen::Index s = day; s < day + d; ++s) {
        const auto& mat = panel.values[static_cast<size_t>(s)];
        for (size_t r = 0; r < dead.size(); ++r) {
            rows.row(static_cast<Eigen::Index>(r)) = mat.row(dead[r]);
        }
        lower.rankUpdate(rows.transpose(), 1.0 / static_cast<double>(d));
    }
    Eigen::MatrixXd full = gram.values.selfadjointView<Eigen::Lower>();
    gram.values = std::move(full);
    return gram;
}

Eigen::MatrixXd stack_dead_rows(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                                Eigen::Index day, int d) {
    require_nonempty_dead(dead);
    require_window(panel, day, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(dead.size()) * d, panel.n_stocks());
    Eigen::Index r = 0;
    for (Eigen::Index s = day; s < day + d; ++s) {
        const auto& mat = panel.values[static_cast<size_t>(s)];
        for (Eigen::Index i : dead) stacked.row(r++) = scale * mat.row(i);
    }
    return stacked;
}

double effective_rank(const Eigen::VectorXd& eigenvalues) {
    if (eigenvalues.size() == 0) throw ValidationError("effective_rank: zero spectrum");
    const double max_eig = eigenvalues.maxCoeff();
    const double threshold = kEigPositivity * max_eig;

    double total = 0.0;
    Eigen::Index retained = 0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        if (eigenvalues(j) > threshold && eigenvalues(j) > 0.0) {
            total += eigenvalues(j);
            ++retained;
        }
    }
    if (retained == 0) throw ValidationError("effective_rank: zero spectrum");

    double entropy = 0.0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        if (eigenvalues(j) > threshold && eigenvalues(j) > 0.0) {
            const double p = eigenvalues(j) / total;
            entropy -= p * std::log(p);
        }
    }
    return std::exp(entropy);
}

int select_k(double erank, RoundingMode mode, int max_k) {
    const double raw =
        mode == RoundingMode::truncate ? std::floor(erank) : std::floor(erank + 0.5);
    int k = static_cast<int>(raw);
    k = std::max(k, 1);
    k = std::min(k, max_k);
    return k;
}

EigenPairs eigendecompose(const GramMatrix& gram) {
    const auto& x = gram.values;
    if (x.rows() != x.cols()) throw ValidationError("eigendecompose: matrix not square");
    const double scale = std::max(x.cwiseAbs().maxCoeff(), 1.0);
    if (((x - x.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
        throw ValidationError("eigendecompose: matrix not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigendecompose: eigensolver failed to converge (M = " +
                             std::to_string(x.rows()) + ", |X|_max = " +
                             csv::format_double(x.cwiseAbs().maxCoeff()) + ")");
    }
    const Eigen::VectorXd& values = solver.eigenvalues();
    const double max_eig = values(values.size() - 1);
    if (values(0) < -1e-10 * std::max(max_eig, 0.0)) {
        throw ValidationError("eigendecompose: matrix not positive semi-definite (min eigenvalue " +
                              csv::format_double(values(0)) + ")");
    }
    return finalize_pairs(values, solver.eigenvectors(), "eigendecompose");
}

EigenPairs eigendecompose_dual(const Eigen::MatrixXd& stacked_rows) {
    const Eigen::Index n = stacked_rows.rows();
    Eigen::MatrixXd small = Eigen::MatrixXd::Zero(n, n);
    small.selfadjointView<Eigen::Lower>().rankUpdate(stacked_rows);
    Eigen::MatrixXd small_full = small.selfadjointView<Eigen::Lower>();
    small = std::move(small_full);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(small);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigendecompose_dual: eigensolver failed to converge (n = " +
                             std::to_string(n) + ")");
    }

    const Eigen::VectorXd& values = solver.eigenvalues();
    const double max_eig = values(values.size() - 1);
    const double threshold = kEigPositivity * std::max(max_eig, 0.0);

    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (values(j) > threshold && values(j) > 0.0) keep.push_back(j);
    }
    if (keep.empty()) throw ValidationError("eigendecompose_dual: zero spectrum");

    Eigen::VectorXd kept_values(static_cast<Eigen::Index>(keep.size()));
    Eigen::MatrixXd mapped(stacked_rows.cols(), static_cast<Eigen::Index>(keep.size()));
    for (size_t r = 0; r < keep.size(); ++r) {
        const auto j = keep[r];
        kept_values(static_cast<Eigen::Index>(r)) = values(j);
        Eigen::VectorXd v = stacked_rows.transpose() * solver.eigenvectors().col(j);
        v /= std::sqrt(values(j));
        v.normalize();   // |v| = sqrt(lambda)/sqrt(lambda) up to roundoff
        mapped.col(static_cast<Eigen::Index>(r)) = v;
    }
    return finalize_pairs(kept_values, std::move(mapped), "eigendecompose_dual");
}

FactorSet extract_factors(const PositionPanel& panel, std::span<const Eigen::Index> dead,
                          Eigen::Index day, int d, RoundingMode mode) {
    require_nonempty_dead(dead);
    require_window(panel, day, d);
    if (!window_has_nonzero_row(panel, dead, day, d)) {
        throw ValidationError("no dead alphas with nonzero positions in the window");
    }

    const Eigen::Index n = static_cast<Eigen::Index>(dead.size()) * d;
    EigenPairs pairs;
    if (n < panel.n_stocks()) {
        pairs = eigendecompose_dual(stack_dead_rows(panel, dead, day, d));
    } else {
        pairs = eigendecompose(build_averaged_gram(panel, dead, day, d));
    }

    FactorSet fs;
    fs.stocks = panel.stocks;
    fs.erank = effective_rank(pairs.values);
    fs.rounding_mode = mode;
    fs.k = select_k(fs.erank, mode, static_cast<int>(pairs.values.size()));
    fs.components = pairs.vectors.leftCols(fs.k);
    fs.eigenvalues = pairs.values.head(fs.k);
    return fs;
}

void write_factors_csv(const FactorSet& factors, const std::string& factors_path,
                       const std::string& meta_path) {
    csv::Writer out(factors_path);
    std::string header = "symbol";
    for (int a = 1; a <= factors.k; ++a) header += ",v" + std::to_string(a);
    out.raw_line(header);
    for (Eigen::Index row = 0; row < factors.components.rows(); ++row) {
        std::vector<std::string> fields;
        fields.reserve(static_cast<size_t>(factors.k) + 1);
        fields.push_back(factors.stocks[static_cast<size_t>(row)]);
        for (int a = 0; a < factors.k; ++a) {
            fields.push_back(csv::format_double(factors.components(row, a)));
        }
        out.row(fields);
    }

    csv::Writer meta(meta_path);
    meta.raw_line("k,erank,mode,eigenvalues");
    std::string eigs;
    for (Eigen::Index a = 0; a < factors.eigenvalues.size(); ++a) {
        if (a) eigs += ';';
        eigs += csv::format_double(factors.eigenvalues(a));
    }
    meta.row({std::to_string(factors.k), csv::format_double(factors.erank),
              rounding_mode_name(factors.rounding_mode), eigs});
}

}  // namespace deadalpha
