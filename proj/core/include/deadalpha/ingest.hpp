#pragma once

#include <string>
#include <vector>

#include "deadalpha/panel.hpp"

namespace deadalpha {

/// Default tolerance for the per-row L1 normalization check on load.
inline constexpr double kL1Tolerance = 1e-8;

/// Loads a long-format positions CSV (`date,alpha_id,symbol,position`) into
/// a dense panel. Index lists are sorted and deduplicated; cells not present
/// in the file are zero. Each (alpha, day) row must have unit L1 norm within
/// `l1_tol` or be all-zero (flagged inactive).
///
/// Throws ValidationError on parse failures (naming the line), duplicate
/// (alpha, stock, date) keys, non-finite values, or L1 violations (naming
/// the alpha and date).
PositionPanel load_positions(const std::string& path, double l1_tol = kL1Tolerance);

/// Loads a returns CSV (`date,symbol,return`) into a dense M x T matrix.
/// Missing (stock, date) cells are zero-filled and counted in
/// `missing_filled`. Throws ValidationError on parse failures, duplicates,
/// non-finite values, or an empty file.
ReturnPanel load_returns(const std::string& path);

/// Loads a constraint CSV (`symbol,c1,...,cp`). Columns must be numerically
/// linearly independent (smallest singular value > 1e-10 x largest) and
/// p < M.
ConstraintMatrix load_constraints(const std::string& path);

/// Writes the nonzero cells of a panel back to the long-format CSV schema,
/// days in panel order (most recent first), alphas and stocks ascending.
void write_positions(const PositionPanel& panel, const std::string& path);

/// Writes the full dense return matrix to the returns CSV schema.
void write_returns(const ReturnPanel& panel, const std::string& path);

struct ConstraintViolation {
    Eigen::Index alpha;
    Eigen::Index day;
    Eigen::Index constraint;
    double value;                    // |sum_A P_iAs Q_Aa|
};

struct ConstraintReport {
    std::vector<Eigen::MatrixXd> values;      // per day, N x p exposure magnitudes
    std::vector<ConstraintViolation> flagged; // entries exceeding tol
};

/// Evaluates |sum_A P_iAs Q_Aa| for every (alpha, day, constraint) and flags
/// entries exceeding `tol`. The panel and constraint matrix must share the
/// same stock universe.
ConstraintReport check_constraints(const PositionPanel& panel,
                                   const ConstraintMatrix& q,
                                   double tol);

}  // namespace deadalpha
