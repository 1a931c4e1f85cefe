#pragma once

// Independent brute-force reference implementations used to cross-check the
// library: naive triple-loop Gram sums, a hand-rolled cyclic Jacobi
// eigensolver, explicit least-squares regression residuals via normal
// equations, and plain-loop return statistics. Deliberately built on
// std::vector only so no code is shared with the implementation under test.

#include <string>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;   // row-major

double l1_norm(const Vec& v);
double dot(const Vec& a, const Vec& b);

/// (1/d) sum over days [day, day+d) and dead rows of outer products.
Mat gram(const std::vector<Mat>& days, const std::vector<int>& dead, int day, int d);

struct EigenSystem {
    Vec values;    // descending, full spectrum
    Mat vectors;   // vectors[j] is the eigenvector for values[j]
};

/// Cyclic Jacobi for symmetric matrices; sign convention: the
/// largest-magnitude entry (lowest index on ties) is positive.
EigenSystem jacobi_eigen(Mat a);

/// Positive eigenvalues only (> 1e-12 x max), in the given order.
Vec positive_spectrum(const Vec& values);

double erank(const Vec& eigenvalues);

int select_k(double erank_value, bool truncate, int max_k);

/// Residual of the intercept-free least squares p ~ columns, solved by
/// normal equations and Gaussian elimination.
Vec regression_residual(const Vec& p, const Mat& columns);

/// Gaussian elimination with partial pivoting for small systems.
Vec solve_linear(Mat a, Vec b);

// --- plain-loop return statistics -----------------------------------------

Mat realized_returns(const std::vector<Mat>& pos_days, const Mat& stock_returns);
Mat expected_returns(const Mat& realized, int d);
Mat moving_sigma(const Mat& expected, int d);

struct Reference {
    std::vector<int> dead;      // indices labeled dead at the most recent day
    std::vector<int> good;
    Vec eigenvalues;            // positive spectrum, descending
    Mat components;             // top-k eigenvectors
    double erank_value = 0.0;
    int k = 0;
    Mat ptilde;                 // kept neutralized rows
    Vec gammas;
    std::vector<int> kept;      // good indices that survived neutralization
    Mat stacked;                // ptilde rows then components
};

struct Thresholds {
    double eta_min, eta_dead, s_min, s_dead;
};

/// Full single-date reference pipeline: classify at the most recent day,
/// build the averaged Gram of the dead set, Jacobi-eigendecompose, select K
/// by eRank, regress the good rows and renormalize.
Reference run_reference(const std::vector<Mat>& pos_days, const Mat& stock_returns, int d,
                        int d_gram, const Thresholds& thresholds, bool truncate);

}  // namespace oracle
