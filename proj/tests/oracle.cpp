#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

double l1_norm(const Vec& v) {
    double sum = 0.0;
    for (double x : v) sum += std::abs(x);
    return sum;
}

double dot(const Vec& a, const Vec& b) {
    double sum = 0.0;
    for (size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
    return sum;
}

Mat gram(const std::vector<Mat>& days, const std::vector<int>& dead, int day, int d) {
    const size_t m = days.at(0).at(0).size();
    Mat x(m, Vec(m, 0.0));
    for (int s = day; s < day + d; ++s) {
        const Mat& mat = days.at(static_cast<size_t>(s));
        for (int i : dead) {
            const Vec& row = mat.at(static_cast<size_t>(i));
            for (size_t a = 0; a < m; ++a) {
                for (size_t b = 0; b < m; ++b) {
                    x[a][b] += row[a] * row[b] / static_cast<double>(d);
                }
            }
        }
    }
    return x;
}

namespace {

void fix_sign(Vec& v) {
    size_t best = 0;
    for (size_t j = 1; j < v.size(); ++j) {
        if (std::abs(v[j]) > std::abs(v[best])) best = j;
    }
    if (v[best] < 0.0) {
        for (double& x : v) x = -x;
    }
}

}  // namespace

EigenSystem jacobi_eigen(Mat a) {
    const size_t m = a.size();
    Mat v(m, Vec(m, 0.0));
    for (size_t j = 0; j < m; ++j) v[j][j] = 1.0;   // v[r][c]: component r of eigenvector c

    double scale = 0.0;
    for (size_t p = 0; p < m; ++p) {
        for (size_t q = 0; q < m; ++q) scale = std::max(scale, std::abs(a[p][q]));
    }
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p + 1 < m; ++p) {
            for (size_t q = p + 1; q < m; ++q) off = std::max(off, std::abs(a[p][q]));
        }
        if (off <= 1e-15 * scale) break;

        for (size_t p = 0; p + 1 < m; ++p) {
            for (size_t q = p + 1; q < m; ++q) {
                if (std::abs(a[p][q]) <= 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (size_t r = 0; r < m; ++r) {
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (size_t r = 0; r < m; ++r) {
                    const double apr = a[p][r];
                    const double aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for (size_t r = 0; r < m; ++r) {
                    const double vrp = v[r][p];
                    const double vrq = v[r][q];
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<size_t> order(m);
    for (size_t j = 0; j < m; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](size_t x, size_t y) { return a[x][x] > a[y][y]; });

    EigenSystem sys;
    sys.values.reserve(m);
    sys.vectors.reserve(m);
    for (size_t j : order) {
        sys.values.push_back(a[j][j]);
        Vec vec(m);
        for (size_t r = 0; r < m; ++r) vec[r] = v[r][j];
        fix_sign(vec);
        sys.vectors.push_back(std::move(vec));
    }
    return sys;
}

Vec positive_spectrum(const Vec& values) {
    double max_val = 0.0;
    for (double x : values) max_val = std::max(max_val, x);
    Vec out;
    for (double x : values) {
        if (x > 1e-12 * max_val && x > 0.0) out.push_back(x);
    }
    return out;
}

double erank(const Vec& eigenvalues) {
    const Vec positive = positive_spectrum(eigenvalues);
    if (positive.empty()) throw std::runtime_error("oracle::erank: zero spectrum");
    double total = 0.0;
    for (double x : positive) total += x;
    double entropy = 0.0;
    for (double x : positive) {
        const double p = x / total;
        entropy -= p * std::log(p);
    }
    return std::exp(entropy);
}

int select_k(double erank_value, bool truncate, int max_k) {
    int k = truncate ? static_cast<int>(std::floor(erank_value))
                     : static_cast<int>(std::floor(erank_value + 0.5));
    if (k < 1) k = 1;
    if (k > max_k) k = max_k;
    return k;
}

Vec solve_linear(Mat a, Vec b) {
    const size_t k = a.size();
    for (size_t col = 0; col < k; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < k; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (std::abs(a[col][col]) < 1e-300) throw std::runtime_error("oracle: singular system");
        for (size_t r = col + 1; r < k; ++r) {
            const double factor = a[r][col] / a[col][col];
            for (size_t c = col; c < k; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    Vec x(k, 0.0);
    for (size_t r = k; r-- > 0;) {
        double sum = b[r];
        for (size_t c = r + 1; c < k; ++c) sum -= a[r][c] * x[c];
        x[r] = sum / a[r][r];
    }
    return x;
}

Vec regression_residual(const Vec& p, const Mat& columns) {
    const size_t k = columns.size();
    if (k == 0) return p;
    Mat normal(k, Vec(k, 0.0));
    Vec rhs(k, 0.0);
    for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) normal[a][b] = dot(columns[a], columns[b]);
        rhs[a] = dot(columns[a], p);
    }
    const Vec beta = solve_linear(std::move(normal), std::move(rhs));
    Vec residual = p;
    for (size_t a = 0; a < k; ++a) {
        for (size_t j = 0; j < residual.size(); ++j) residual[j] -= beta[a] * columns[a][j];
    }
    return residual;
}

Mat realized_returns(const std::vector<Mat>& pos_days, const Mat& stock_returns) {
    const size_t n = pos_days.at(0).size();
    const size_t t = pos_days.size();
    Mat rho(n, Vec(t, 0.0));
    for (size_t s = 0; s < t; ++s) {
        for (size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (size_t a = 0; a < pos_days[s][i].size(); ++a) {
                sum += pos_days[s][i][a] * stock_returns[a][s];
            }
            rho[i][s] = sum;
        }
    }
    return rho;
}

Mat expected_returns(const Mat& realized, int d) {
    const size_t n = realized.size();
    const size_t t = realized.at(0).size();
    Mat eta(n, Vec(t - static_cast<size_t>(d), 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t s = 0; s + static_cast<size_t>(d) < t; ++s) {
            double sum = 0.0;
            for (int j = 1; j <= d; ++j) sum += realized[i][s + static_cast<size_t>(j)];
            eta[i][s] = sum / d;
        }
    }
    return eta;
}

Mat moving_sigma(const Mat& expected, int d) {
    const size_t n = expected.size();
    const size_t t = expected.at(0).size();
    Mat sigma(n, Vec(t - static_cast<size_t>(d), 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t s = 0; s + static_cast<size_t>(d) < t; ++s) {
            double mean = 0.0;
            for (int j = 1; j <= d; ++j) mean += expected[i][s + static_cast<size_t>(j)];
            mean /= d;
            double var = 0.0;
            for (int j = 1; j <= d; ++j) {
                const double diff = expected[i][s + static_cast<size_t>(j)] - mean;
                var += diff * diff;
            }
            sigma[i][s] = std::sqrt(var / (d - 1));
        }
    }
    return sigma;
}

Reference run_reference(const std::vector<Mat>& pos_days, const Mat& stock_returns, int d,
                        int d_gram, const Thresholds& thresholds, bool truncate) {
    Reference ref;
    const Mat rho = realized_returns(pos_days, stock_returns);
    const Mat eta = expected_returns(rho, d);
    const Mat sigma = moving_sigma(eta, d);

    const size_t n = pos_days[0].size();
    for (size_t i = 0; i < n; ++i) {
        const double e = eta[i][0];
        const double sg = sigma[i][0];
        double sharpe;
        if (sg == 0.0) {
            sharpe = e > 0.0 ? std::numeric_limits<double>::infinity()
                             : (e < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
        } else {
            sharpe = e / sg;
        }
        if (e < thresholds.eta_dead && sharpe < thresholds.s_dead) {
            ref.dead.push_back(static_cast<int>(i));
        } else if (e >= thresholds.eta_min && sharpe >= thresholds.s_min) {
            ref.good.push_back(static_cast<int>(i));
        }
    }

    const Mat x = gram(pos_days, ref.dead, 0, d_gram);
    const EigenSystem sys = jacobi_eigen(x);
    ref.eigenvalues = positive_spectrum(sys.values);
    ref.erank_value = erank(sys.values);
    ref.k = select_k(ref.erank_value, truncate, static_cast<int>(ref.eigenvalues.size()));
    for (int a = 0; a < ref.k; ++a) ref.components.push_back(sys.vectors[static_cast<size_t>(a)]);

    for (int i : ref.good) {
        const Vec& p = pos_days[0][static_cast<size_t>(i)];
        Vec residual = regression_residual(p, ref.components);
        const double l1 = l1_norm(residual);
        if (l1 < 1e-12) continue;
        for (double& xj : residual) xj /= l1;
        ref.kept.push_back(i);
        ref.gammas.push_back(1.0 / l1);
        ref.ptilde.push_back(std::move(residual));
    }

    ref.stacked = ref.ptilde;
    for (const Vec& comp : ref.components) ref.stacked.push_back(comp);
    return ref;
}

}  // namespace oracle
