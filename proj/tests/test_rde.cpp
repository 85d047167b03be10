#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "pmlab/ode.hpp"
#include "pmlab/rde.hpp"

using namespace pmlab;

namespace {

// Shared fixtures: one converged pool and one ODE solution at lambda = 1.
const rde::RdeResult& converged_pool() {
    static const rde::RdeResult res = rde::solve_rde(1.0, 20000, 400, 11, 2);
    return res;
}

const ode::OdeSolution& ode_solution() {
    static const ode::OdeSolution sol = *ode::solve(1.0);
    return sol;
}

}  // namespace

TEST_CASE("pool validation") {
    CHECK_THROWS_AS(rde::solve_rde(1.0, 10, 10, 1), std::invalid_argument);
    rde::RdePool empty;
    CHECK_THROWS_AS(rde::rde_step(empty), std::invalid_argument);
}

TEST_CASE("point-mass pools contract toward the fixed point") {
    const ode::CdfGrid grid(ode_solution().trajectory);
    rde::RdePool pool;
    pool.lambda = 1.0;
    pool.seed = 5;
    pool.x_samples.assign(20000, 3.0);
    pool.y_samples.assign(20000, 3.0);

    const double ks0 = stats::ks_vs_cdf(pool.x_samples, [&](double x) { return grid.cdf_x(x); });
    for (int i = 0; i < 10; ++i) pool = rde::rde_step(pool, 2);
    const double ks10 = stats::ks_vs_cdf(pool.x_samples, [&](double x) { return grid.cdf_x(x); });
    CHECK(ks10 < 0.5 * ks0);
    CHECK(ks10 < 0.1);
}

TEST_CASE("solve_rde converges at lambda=1") {
    const auto& res = converged_pool();
    CHECK(res.converged);
    CHECK(res.iterations < 400);
    REQUIRE(!res.ks_trace.empty());
    // The trace settles near the sampling noise floor.
    CHECK(res.ks_trace.back() < 5.0 / std::sqrt(20000.0));
}

TEST_CASE("stationarity: one extra step moves the cdf by less than 2/sqrt(P)") {
    const auto& res = converged_pool();
    const auto next = rde::rde_step(res.pool, 2);
    const double ks = stats::ks_two_sample(res.pool.x_samples, next.x_samples);
    CHECK(ks < 2.0 / std::sqrt(20000.0));
}

TEST_CASE("fixed point matches the ODE cdfs") {
    const auto& res = converged_pool();
    const ode::CdfGrid grid(ode_solution().trajectory);
    const double ks_x = stats::ks_vs_cdf(res.pool.x_samples, [&](double x) { return grid.cdf_x(x); });
    const double ks_y = stats::ks_vs_cdf(res.pool.y_samples, [&](double x) { return grid.cdf_y(x); });
    CHECK(ks_x < 0.04);
    CHECK(ks_y < 0.04);
}

TEST_CASE("positive mass above zero per the mgf lemma") {
    const auto& res = converged_pool();
    const auto& xs = res.pool.x_samples;
    const double p_pos = static_cast<double>(std::count_if(xs.begin(), xs.end(),
                                                           [](double v) { return v > 0.0; })) /
                         static_cast<double>(xs.size());
    CHECK(p_pos >= 0.48);
}

TEST_CASE("upper tail is dominated by the mgf bound") {
    const auto& res = converged_pool();
    std::vector<double> xs(res.pool.x_samples);
    std::sort(xs.begin(), xs.end());
    const double q999 = stats::quantile_sorted(xs, 0.999);
    const auto& ys = res.pool.y_samples;
    const double fbar_y0 = static_cast<double>(std::count_if(ys.begin(), ys.end(),
                                                             [](double v) { return v > 0.0; })) /
                           static_cast<double>(ys.size());
    const double sigma = std::sqrt(0.001 * 0.999 / static_cast<double>(xs.size()));
    CHECK(0.001 <= std::exp(-q999 * fbar_y0) + 4.0 * sigma);
}

TEST_CASE("histogram skew: density above zero dominates its mirror") {
    const auto& xs = converged_pool().pool.x_samples;
    for (double x0 : {0.5, 1.0, 2.0}) {
        const double h = 0.25;
        auto count_in = [&](double lo, double hi) {
            return static_cast<double>(std::count_if(
                xs.begin(), xs.end(), [&](double v) { return v >= lo && v < hi; }));
        };
        const double above = count_in(x0 - h / 2, x0 + h / 2);
        const double below = count_in(-x0 - h / 2, -x0 + h / 2);
        CHECK(above >= below - 4.0 * std::sqrt(above + below + 1.0));
    }
}

TEST_CASE("degenerate pools drive the direct estimator to the endpoints") {
    stats::SampledDistribution high(std::vector<double>(1000, 1000.0));
    stats::SampledDistribution low(std::vector<double>(1000, -1000.0));
    const auto hi = rde::estimate_alpha_from_samples(high, 1.0, 2000, 3);
    const auto lo = rde::estimate_alpha_from_samples(low, 1.0, 2000, 3);
    CHECK(hi.estimate == doctest::Approx(1.0));
    CHECK(lo.estimate == doctest::Approx(0.0));
}

TEST_CASE("direct alpha estimate agrees with the ODE") {
    const auto& res = converged_pool();
    const stats::SampledDistribution xd(res.pool.x_samples);
    const auto est = rde::estimate_alpha_from_samples(xd, 1.0, 20000, 17);
    const double alpha_ode = ode_solution().alpha;
    CHECK(std::abs(est.estimate - alpha_ode) <= 3.0 * est.stderr_est + 0.01);
}

TEST_CASE("pool dump format") {
    rde::RdePool pool;
    pool.lambda = 1.25;
    pool.iteration = 7;
    pool.x_samples = {1.5, -0.25};
    pool.y_samples = {0.0};
    const std::string text = rde::dump_pool(pool, 'X');
    CHECK(text == "# rde lambda=1.25 iter=7 kind=X\n1.5\n-0.25\n");
    CHECK_THROWS_AS(rde::dump_pool(pool, 'Z'), std::invalid_argument);
}
