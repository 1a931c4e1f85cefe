#include <doctest.h>

#include <cmath>
#include <random>

#include "deadalpha/alpha_stats.hpp"
#include "deadalpha/errors.hpp"
#include "test_util.hpp"

using namespace deadalpha;

namespace {

ReturnPanel returns_for(const PositionPanel& panel, const Eigen::MatrixXd& values) {
    ReturnPanel r;
    r.stocks = panel.stocks;
    r.dates = panel.dates;
    r.values = values;
    return r;
}

}  // namespace

TEST_CASE("realized_returns: hand dot product") {
    PositionPanel panel =
        testutil::make_panel({(Eigen::MatrixXd(1, 2) << 0.5, -0.5).finished()});
    const ReturnPanel r = returns_for(panel, (Eigen::MatrixXd(2, 1) << 0.02, -0.02).finished());
    const Eigen::MatrixXd rho = realized_returns(panel, r);
    CHECK(rho(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("realized_returns: zero returns give zero rho") {
    std::mt19937_64 rng(3);
    PositionPanel panel = testutil::random_panel(4, 6, 3, rng);
    const ReturnPanel r = returns_for(panel, Eigen::MatrixXd::Zero(6, 3));
    CHECK(realized_returns(panel, r).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("realized_returns: identity contraction") {
    PositionPanel panel = testutil::make_panel({(Eigen::MatrixXd(1, 1) << 1.0).finished()});
    const ReturnPanel r = returns_for(panel, (Eigen::MatrixXd(1, 1) << 0.01).finished());
    CHECK(realized_returns(panel, r)(0, 0) == 0.01);
}

TEST_CASE("realized_returns: missing stock is an index error") {
    PositionPanel panel = testutil::make_panel({(Eigen::MatrixXd(1, 2) << 0.5, 0.5).finished()});
    ReturnPanel r;
    r.stocks = {"S0000"};   // S0001 missing
    r.dates = panel.dates;
    r.values = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(realized_returns(panel, r), ValidationError);
}

TEST_CASE("realized_returns: superset return universe is aligned by name") {
    PositionPanel panel = testutil::make_panel({(Eigen::MatrixXd(1, 1) << 1.0).finished()});
    ReturnPanel r;
    r.stocks = {"S0000", "ZZZZ"};
    r.dates = {panel.dates[0], "0000-01-01"};
    r.values = (Eigen::MatrixXd(2, 2) << 0.03, 9.9, 9.9, 9.9).finished();
    CHECK(realized_returns(panel, r)(0, 0) == 0.03);
}

TEST_CASE("expected_returns: mean of constants") {
    Eigen::MatrixXd rho = Eigen::MatrixXd::Constant(2, 8, 0.01);
    const Eigen::MatrixXd eta = expected_returns(rho, 5);
    CHECK(eta.cols() == 3);
    for (Eigen::Index s = 0; s < eta.cols(); ++s) {
        CHECK(eta(0, s) == doctest::Approx(0.01).epsilon(1e-15));
    }
}

TEST_CASE("expected_returns: excludes day s itself") {
    // eta at the newest day must not depend on that day's rho.
    Eigen::MatrixXd rho(1, 3);
    rho << 123.0, 0.01, 0.03;
    const Eigen::MatrixXd eta = expected_returns(rho, 2);
    CHECK(eta(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("expected_returns: d = T is an insufficient-history error") {
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(1, 5);
    CHECK_THROWS_AS(expected_returns(rho, 5), ValidationError);
}

TEST_CASE("moving_volatility: constant eta has zero sigma") {
    Eigen::MatrixXd eta = Eigen::MatrixXd::Constant(1, 6, 0.004);
    const auto vol = moving_volatility(eta, 3);
    CHECK(vol.sigma.cwiseAbs().maxCoeff() <= 1e-18);
}

TEST_CASE("moving_volatility: hand variance of a 2-day window") {
    Eigen::MatrixXd eta(1, 3);
    eta << 0.0, 0.01, 0.03;   // window for s=0 is (0.01, 0.03)
    const auto vol = moving_volatility(eta, 2);
    CHECK(vol.window_mean(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(vol.sigma(0, 0) * vol.sigma(0, 0) == doctest::Approx(2e-4).epsilon(1e-12));
    CHECK(vol.sigma(0, 0) == doctest::Approx(0.0141421356).epsilon(1e-8));
}

TEST_CASE("moving_volatility: d = 1 rejected") {
    Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(1, 5);
    CHECK_THROWS_AS(moving_volatility(eta, 1), ConfigError);
    ClassificationConfig cfg;
    cfg.d = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("sharpe convention at sigma = 0") {
    CHECK(std::isinf(sharpe_value(0.001, 0.0)));
    CHECK(sharpe_value(0.001, 0.0) > 0);
    CHECK(sharpe_value(-0.001, 0.0) < 0);
    CHECK(sharpe_value(0.0, 0.0) == 0.0);
}

TEST_CASE("classify: flatlined alpha is dead") {
    ClassificationConfig cfg;
    cfg.eta_dead = 0.0005;
    cfg.s_dead = 0.5;
    cfg.eta_min = 0.0005;
    cfg.s_min = 0.5;
    const double sharpe = sharpe_value(0.0, 0.0);
    CHECK(is_dead(0.0, sharpe, cfg));
    CHECK_FALSE(is_good(0.0, sharpe, cfg));
}

TEST_CASE("classify: threshold oracle examples") {
    ClassificationConfig cfg;
    cfg.eta_min = 0.001;
    cfg.s_min = 1.0;
    cfg.eta_dead = 0.0005;
    cfg.s_dead = 0.5;

    SUBCASE("sharpe 2 passes good") {
        const double sharpe = sharpe_value(0.002, 0.001);
        CHECK(sharpe == doctest::Approx(2.0));
        CHECK(is_good(0.002, sharpe, cfg));
        CHECK_FALSE(is_dead(0.002, sharpe, cfg));
    }
    SUBCASE("sharpe 0.5 fails good, eta fails dead: indeterminate") {
        const double sharpe = sharpe_value(0.002, 0.004);
        CHECK(sharpe == doctest::Approx(0.5));
        CHECK_FALSE(is_good(0.002, sharpe, cfg));
        CHECK_FALSE(is_dead(0.002, sharpe, cfg));
    }
}

TEST_CASE("classify: labels over a panel, newest day first") {
    std::mt19937_64 rng(9);
    PositionPanel panel = testutil::random_panel(6, 5, 12, rng);
    Eigen::MatrixXd rv(5, 12);
    std::normal_distribution<double> normal(0.0, 0.01);
    for (Eigen::Index a = 0; a < 5; ++a) {
        for (Eigen::Index s = 0; s < 12; ++s) rv(a, s) = normal(rng);
    }
    const ReturnPanel r = returns_for(panel, rv);

    ClassificationConfig cfg;
    cfg.d = 3;
    const AlphaStats stats = compute_alpha_stats(panel, r, cfg);
    CHECK(stats.expected.cols() == 9);
    CHECK(stats.volatility.cols() == 6);
    const LabelMatrix labels = classify(stats, cfg);
    CHECK(labels.rows == 6);
    CHECK(labels.cols == 6);
    CHECK(labels.dates[0] == panel.dates[0]);
}

TEST_CASE("property: no (alpha, day) is both dead and good") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.002, 0.002);
    for (int trial = 0; trial < 500; ++trial) {
        const double eta = 0.004 * normal(rng);
        const double sigma = std::abs(0.002 * normal(rng));
        const double sharpe = sharpe_value(eta, sigma);

        ClassificationConfig cfg;
        cfg.eta_dead = u(rng);
        cfg.eta_min = cfg.eta_dead + std::abs(u(rng));
        cfg.s_dead = u(rng) * 1000;
        cfg.s_min = cfg.s_dead + std::abs(u(rng)) * 1000;
        CHECK_FALSE((is_dead(eta, sharpe, cfg) && is_good(eta, sharpe, cfg)));
    }
}

TEST_CASE("property: sharpe is invariant under return scaling") {
    std::mt19937_64 rng(22);
    PositionPanel panel = testutil::random_panel(5, 8, 20, rng);
    Eigen::MatrixXd rv(8, 20);
    std::normal_distribution<double> normal(0.0, 0.01);
    for (Eigen::Index a = 0; a < 8; ++a) {
        for (Eigen::Index s = 0; s < 20; ++s) rv(a, s) = normal(rng);
    }

    ClassificationConfig cfg;
    cfg.d = 4;
    const AlphaStats base = compute_alpha_stats(panel, returns_for(panel, rv), cfg);
    const AlphaStats scaled =
        compute_alpha_stats(panel, returns_for(panel, Eigen::MatrixXd(3.7 * rv)), cfg);

    for (Eigen::Index i = 0; i < base.volatility.rows(); ++i) {
        for (Eigen::Index s = 0; s < base.volatility.cols(); ++s) {
            const double s1 = sharpe_value(base.expected(i, s), base.volatility(i, s));
            const double s2 = sharpe_value(scaled.expected(i, s), scaled.volatility(i, s));
            CHECK(s1 == doctest::Approx(s2).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: eta over constant rho equals the constant to 1e-15 relative") {
    Eigen::MatrixXd rho = Eigen::MatrixXd::Constant(3, 30, 7.3e-4);
    const Eigen::MatrixXd eta = expected_returns(rho, 10);
    CHECK(((eta.array() - 7.3e-4).abs() / 7.3e-4).maxCoeff() <= 1e-15);
}
