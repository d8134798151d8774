#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "oce/core/random.hpp"
#include "oce/shallow/linreg.hpp"
#include "oce/shallow/scaler.hpp"
#include "oce/shallow/svr.hpp"

using namespace oce;
using namespace oce::shallow;
using Catch::Approx;

namespace {

const std::vector<double> kX{-1.6, -1.1, -0.7, -0.3, 0.0, 0.2, 0.5, 0.9, 1.3, 1.8};
const std::vector<double> kY{11.0, 9.4, 8.1, 7.2, 6.9, 6.1, 5.5, 5.0, 4.6, 4.1};
const std::vector<double> kQuery{-1.5, -0.5, 0.0, 0.7, 1.5};

double primal_objective(double w, double b, const std::vector<double>& x, const std::vector<double>& y, double C,
                        double eps)
{
    double loss = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        loss += std::max(0.0, std::abs(y[i] - w * x[i] - b) - eps);
    return 0.5 * w * w + C * loss;
}

/// Coarse-to-fine grid minimisation of the linear primal objective.
std::pair<double, double> primal_grid_minimum(const std::vector<double>& x, const std::vector<double>& y, double C,
                                              double eps)
{
    double wc = 0, bc = 0, span = 50;
    for (int level = 0; level < 40; ++level) {
        double best = std::numeric_limits<double>::infinity(), bw = wc, bb = bc;
        for (int i = -20; i <= 20; ++i)
            for (int j = -20; j <= 20; ++j) {
                const double w = wc + span * i / 20.0, b = bc + span * j / 20.0;
                const double o = primal_objective(w, b, x, y, C, eps);
                if (o < best) {
                    best = o;
                    bw = w;
                    bb = b;
                }
            }
        wc = bw;
        bc = bb;
        span *= 0.5;
    }
    return {wc, bc};
}

} // namespace

TEST_CASE("least squares recovers an exact line")
{
    const std::vector<double> x{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
    const auto m = fit_linreg(x, y);
    CHECK(m.slope == Approx(2.0));
    CHECK(m.intercept == Approx(1.0));
    CHECK(m.predict(10.0) == Approx(21.0));
}

TEST_CASE("least squares matches the normal equations on noisy data")
{
    Rng rng(5);
    std::vector<double> x(200), y(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(-3, 3);
        y[i] = -1.5 * x[i] + 0.3 + rng.normal(0, 0.2);
    }
    const auto m = fit_linreg(x, y);
    // residuals orthogonal to [1, x]
    double r1 = 0, rx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - m.predict(x[i]);
        r1 += r;
        rx += r * x[i];
    }
    CHECK(std::abs(r1) < 1e-9);
    CHECK(std::abs(rx) < 1e-9);
    CHECK(m.slope == Approx(-1.5).margin(0.05));
}

TEST_CASE("least squares rejects degenerate designs")
{
    const std::vector<double> same{2, 2, 2}, y{1, 2, 3};
    CHECK_THROWS_AS(fit_linreg(same, y), Error);
    CHECK_THROWS_AS(fit_linreg(std::vector<double>{1}, std::vector<double>{1}), Error);
    CHECK_THROWS_AS(fit_linreg(std::vector<double>{1, 2}, y), Error);
}

TEST_CASE("scaler standardises and tolerates constant features")
{
    const std::vector<double> x{1, 2, 3, 4};
    const auto s = FeatureScaler::fit(x);
    const auto z = s.transform(x);
    double m = 0, v = 0;
    for (double e : z)
        m += e;
    m /= 4;
    for (double e : z)
        v += (e - m) * (e - m);
    CHECK(std::abs(m) < 1e-12);
    CHECK(v / 4 == Approx(1.0));
    const auto c = FeatureScaler::fit(std::vector<double>{3, 3, 3});
    CHECK(std::isfinite(c.transform(3.0)));
}

TEST_CASE("linear SVR reaches the primal optimum found by grid search")
{
    for (double C : {1.0, 10.0})
        for (double eps : {0.05, 0.5}) {
            SvrParams p;
            p.C = C;
            p.epsilon = eps;
            p.tol = 1e-8;
            const auto m = fit_svr(kX, kY, p);
            double w = 0;
            for (std::size_t i = 0; i < m.coef.size(); ++i)
                w += m.coef[i] * m.support[i];
            const auto [gw, gb] = primal_grid_minimum(kX, kY, C, eps);
            const double ours = primal_objective(w, m.bias, kX, kY, C, eps);
            const double grid = primal_objective(gw, gb, kX, kY, C, eps);
            CHECK(ours <= grid + 1e-6 * std::max(1.0, grid));
            CHECK(w == Approx(gw).margin(1e-3));
        }
}

TEST_CASE("SVR predictions agree with a reference solver")
{
    // Frozen from an independent libsvm-based solver at tol 1e-8, C = 10, epsilon = 0.1.
    const std::vector<double> rbf{10.7350723253, 7.7170794345, 6.6602475928, 5.2117841205, 4.3142835130};
    const std::vector<double> lin{9.7500000886, 7.8125004380, 6.8437506127, 5.4875008572, 3.9375011367};
    SvrParams p;
    p.C = 10.0;
    p.epsilon = 0.1;
    p.tol = 1e-8;
    p.kernel = Kernel::rbf(1.0);
    const auto mr = fit_svr(kX, kY, p);
    p.kernel = Kernel::linear();
    const auto ml = fit_svr(kX, kY, p);
    for (std::size_t i = 0; i < kQuery.size(); ++i) {
        CHECK(mr.predict(kQuery[i]) == Approx(rbf[i]).margin(1e-4));
        CHECK(ml.predict(kQuery[i]) == Approx(lin[i]).margin(1e-4));
    }
}

TEST_CASE("SVR fits stay inside the epsilon tube when C is large")
{
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(i / 10.0);
        y.push_back(std::sin(3.0 * i / 10.0));
    }
    SvrParams p;
    p.kernel = Kernel::rbf(2.0);
    p.C = 1000;
    p.epsilon = 0.05;
    p.tol = 1e-6;
    const auto m = fit_svr(x, y, p);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(m.predict(x[i]) - y[i]) <= 0.05 + 1e-4);
}

TEST_CASE("SVR input validation and iteration cap")
{
    SvrParams p;
    CHECK_THROWS_AS(fit_svr(std::vector<double>{1}, std::vector<double>{1}, p), Error);
    CHECK_THROWS_AS(fit_svr(kX, std::vector<double>{1, 2}, p), Error);
    p.C = 0;
    CHECK_THROWS_AS(fit_svr(kX, kY, p), Error);
    p = SvrParams{};
    p.max_iterations = 1;
    p.tol = 1e-12;
    try {
        fit_svr(kX, kY, p);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoConvergence);
    }
}

TEST_CASE("SVR model JSON round trip")
{
    SvrParams p;
    p.kernel = Kernel::rbf(0.5);
    const auto m = fit_svr(kX, kY, p);
    const nlohmann::json j = m;
    const auto back = j.get<SvrModel>();
    for (double q : kQuery)
        CHECK(back.predict(q) == m.predict(q));
}
