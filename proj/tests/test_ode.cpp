#include <doctest.h>

#include <array>
#include <cmath>

#include "pmlab/ode.hpp"

using namespace pmlab;
using ode::BasinClass;

namespace {

// Independent route: fixed-step RK4 on the four-dimensional system
//   F' = (1-F)(1-G)V, V' = lambda(V-F), G' = -(1-F)(1-G)W, W' = lambda(G-W)
// from (eps/2, eps/2, eps, eps). Used as a cross-check oracle only.
struct Quad {
    double f, g, v, w;
};

Quad rhs4(const Quad& y, double lambda) {
    const double common = (1.0 - y.f) * (1.0 - y.g);
    return {common * y.v, -common * y.w, lambda * (y.v - y.f), lambda * (y.g - y.w)};
}

Quad rk4_path(double lambda, double eps, double x_end, double h) {
    Quad y{eps / 2.0, eps / 2.0, eps, eps};
    const auto add = [](const Quad& a, const Quad& b, double s) {
        return Quad{a.f + s * b.f, a.g + s * b.g, a.v + s * b.v, a.w + s * b.w};
    };
    std::size_t steps = static_cast<std::size_t>(std::llround(x_end / h));
    for (std::size_t i = 0; i < steps; ++i) {
        const Quad k1 = rhs4(y, lambda);
        const Quad k2 = rhs4(add(y, k1, h / 2), lambda);
        const Quad k3 = rhs4(add(y, k2, h / 2), lambda);
        const Quad k4 = rhs4(add(y, k3, h), lambda);
        y.f += h / 6 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
        y.g += h / 6 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g);
        y.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
        y.w += h / 6 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w);
    }
    return y;
}

}  // namespace

TEST_CASE("rhs at the saddle vanishes") {
    const auto d = ode::rhs(1.0, 1.0, 0.0, 1.7);
    CHECK(d.du == 0.0);
    CHECK(d.dv == 0.0);
    CHECK(d.dw == 0.0);
}

TEST_CASE("rhs at the initial condition") {
    const double lambda = 2.3, eps = 0.4;
    const auto d = ode::rhs(0.5, eps, eps, lambda);
    CHECK(d.du == doctest::Approx(-lambda / 4 + (1 - eps / 2) * (1 - eps / 2)).epsilon(1e-14));
    CHECK(d.dv == doctest::Approx(lambda * eps / 2).epsilon(1e-14));
    CHECK(d.dw == doctest::Approx(-lambda * eps / 2).epsilon(1e-14));
}

TEST_CASE("at lambda=4 the u-drift at u=1/2 is non-positive") {
    for (double v : {0.1, 0.4, 0.9}) {
        for (double w : {0.05, 0.5, 0.9}) {
            const auto d = ode::rhs(0.5, v, w, 4.0);
            CHECK(d.du <= 0.0);
        }
    }
}

TEST_CASE("endpoint classifications") {
    const auto top = ode::integrate_classify(1.0, 1.0, 100.0);
    CHECK(top.kind == BasinClass::Kind::EscapedV);
    const auto bottom = ode::integrate_classify(1.0, 0.0, 100.0);
    CHECK(bottom.kind == BasinClass::Kind::EscapedU);
}

TEST_CASE("basin scan has a single change point") {
    int changes = 0;
    BasinClass::Kind prev = BasinClass::Kind::EscapedU;
    for (int k = 0; k <= 100; ++k) {
        const double eps = static_cast<double>(k) / 100.0;
        double x_max = 100.0;
        BasinClass c = ode::integrate_classify(1.0, eps, x_max);
        while (c.kind == BasinClass::Kind::Undetermined && x_max < 1e4) {
            x_max *= 2;
            c = ode::integrate_classify(1.0, eps, x_max);
        }
        REQUIRE(c.kind != BasinClass::Kind::Undetermined);
        if (k == 0) {
            REQUIRE(c.kind == BasinClass::Kind::EscapedU);
        } else if (c.kind != prev) {
            ++changes;
            CHECK(c.kind == BasinClass::Kind::EscapedV);
        }
        prev = c.kind;
    }
    CHECK(changes == 1);
}

TEST_CASE("no solution at and above lambda=4") {
    for (double l : {4.0, 4.5, 5.0}) {
        const auto r = ode::find_epsilon0(l);
        CHECK(r.no_solution);
    }
}

TEST_CASE("epsilon0 bracket at lambda=1") {
    const auto r = ode::find_epsilon0(1.0);
    REQUIRE(!r.no_solution);
    CHECK(r.epsilon0 > 0.0);
    CHECK(r.epsilon0 < 1.0);
    CHECK(r.bracket_width < 1e-14);

    // Direct re-integration on both sides of the change point.
    double x_max = 200.0;
    const auto below = ode::integrate_classify(1.0, r.epsilon0 - 1e-9, x_max);
    const auto above = ode::integrate_classify(1.0, r.epsilon0 + 1e-9, x_max);
    CHECK(below.kind == BasinClass::Kind::EscapedU);
    CHECK(above.kind == BasinClass::Kind::EscapedV);
}

TEST_CASE("epsilon0 is stable under tolerance refinement") {
    ode::IntegratorOptions loose{1e-10, 1e-10};
    ode::IntegratorOptions tight{1e-13, 1e-13};
    const auto a = ode::find_epsilon0(1.0, loose);
    const auto b = ode::find_epsilon0(1.0, tight);
    CHECK(std::abs(a.epsilon0 - b.epsilon0) <= 1e-8);
}

TEST_CASE("reconstructed trajectory satisfies the structural identities") {
    const auto eps = ode::find_epsilon0(1.0);
    const auto traj = ode::reconstruct_solution(1.0, eps.epsilon0);
    REQUIRE(traj.points.size() > 100);

    const auto& p0 = traj.points.front();
    CHECK(p0.f == doctest::Approx(eps.epsilon0 / 2).epsilon(1e-14));
    CHECK(p0.g == doctest::Approx(eps.epsilon0 / 2).epsilon(1e-14));
    CHECK(p0.v == doctest::Approx(2 * p0.f).epsilon(1e-14));  // V(0) = 2 F(0)

    for (const auto& p : traj.points) {
        CHECK(p.u > 0.0);
        CHECK(p.v > 0.0);
        CHECK(p.w > 0.0);
        CHECK(p.f < 1.0);
        CHECK(p.g < 1.0);
        CHECK(std::abs(p.f * p.w + p.g * p.v - p.v * p.w) < 1e-12);
        if (p.w > 1e-250) {
            const double ratio = p.v / (p.w * std::exp(traj.lambda * p.x));
            CHECK(std::abs(ratio - 1.0) < 1e-8);
        }
    }

    // Final approach to the saddle is monotone over the last tenth.
    const std::size_t tail_begin = traj.points.size() * 9 / 10;
    for (std::size_t i = tail_begin + 1; i < traj.points.size(); ++i) {
        CHECK(traj.points[i].u >= traj.points[i - 1].u - 1e-12);
        CHECK(traj.points[i].v >= traj.points[i - 1].v - 1e-12);
        CHECK(traj.points[i].w <= traj.points[i - 1].w + 1e-12);
    }
    const auto& last = traj.points.back();
    CHECK(std::abs(1.0 - last.u) < 1e-4);
    CHECK(std::abs(1.0 - last.v) < 1e-4);
    CHECK(last.w < 1e-4);
}

TEST_CASE("reduced and four-dimensional routes agree") {
    const auto eps = ode::find_epsilon0(1.3);
    const auto traj = ode::reconstruct_solution(1.3, eps.epsilon0);
    const double x_probe = std::min(5.0, traj.x_T);
    const Quad q = rk4_path(1.3, eps.epsilon0, x_probe, 1e-4);
    const auto& p = traj.points[static_cast<std::size_t>(std::llround(x_probe / traj.dx))];
    CHECK(p.f == doctest::Approx(q.f).epsilon(1e-7));
    CHECK(p.g == doctest::Approx(q.g).epsilon(1e-7));
    CHECK(p.v == doctest::Approx(q.v).epsilon(1e-7));
    CHECK(p.w == doctest::Approx(q.w).epsilon(1e-7));
    // Conservation along the independent route.
    CHECK(std::abs(q.f * q.w + q.g * q.v - q.v * q.w) < 1e-9);
}

TEST_CASE("epsilon monotonicity of u, v, w") {
    const double lambda = 1.0;
    const auto eps = ode::find_epsilon0(lambda);
    for (double base : {0.6 * eps.epsilon0, 0.9 * eps.epsilon0, eps.epsilon0}) {
        const double hi = base + 1e-3;
        const auto pa = ode::sample_path(lambda, base, 6.0);
        const auto pb = ode::sample_path(lambda, hi, 6.0);
        const std::size_t m = std::min(pa.size(), pb.size());
        for (std::size_t i = 1; i < m; ++i) {
            if (pa[i].u > 1.0 || pb[i].u > 1.0) break;
            CHECK(pb[i].u < pa[i].u + 1e-12);
            CHECK(pb[i].w > pa[i].w - 1e-12);
            CHECK(pb[i].v >= pa[i].v - 1e-12);
        }
    }
}

TEST_CASE("alpha is in (0,1), increases with lambda, and is quadrature-stable") {
    const auto eps1 = ode::find_epsilon0(1.0);
    const auto t1 = ode::reconstruct_solution(1.0, eps1.epsilon0);
    const auto a1 = ode::compute_alpha(t1);
    CHECK(a1.alpha > 0.0);
    CHECK(a1.alpha < 1.0);

    const auto t1f = ode::reconstruct_solution(1.0, eps1.epsilon0, 0.005);
    const auto a1f = ode::compute_alpha(t1f);
    CHECK(std::abs(a1.alpha - a1f.alpha) < 1e-6);

    const auto eps_small = ode::find_epsilon0(0.25);
    const auto ts = ode::reconstruct_solution(0.25, eps_small.epsilon0);
    const auto as = ode::compute_alpha(ts);
    const auto eps2 = ode::find_epsilon0(2.0);
    const auto t2 = ode::reconstruct_solution(2.0, eps2.epsilon0);
    const auto a2 = ode::compute_alpha(t2);
    CHECK(as.alpha < a2.alpha);
}

TEST_CASE("weights are non-negative and approach zeta(2) as lambda -> 0") {
    const auto sol = ode::solve(0.1);
    REQUIRE(sol.has_value());
    CHECK(sol->beta_p >= 0.0);
    CHECK(sol->beta_u >= 0.0);
    const double zeta2 = M_PI * M_PI / 6.0;
    CHECK(std::abs(sol->beta_p + sol->beta_u - zeta2) < 0.15 * zeta2);
}

TEST_CASE("cdf grid is a valid cdf pair") {
    const auto sol = ode::solve(1.0);
    REQUIRE(sol.has_value());
    const ode::CdfGrid grid(sol->trajectory);

    double prev = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.25) {
        const double c = grid.cdf_x(x);
        CHECK(c >= prev - 1e-15);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        prev = c;
    }
    for (double u : {0.001, 0.1, 0.4, 0.5, 0.9, 0.999}) {
        CHECK(grid.cdf_x(grid.quantile_x(u)) == doctest::Approx(u).epsilon(1e-3));
        CHECK(grid.cdf_y(grid.quantile_y(u)) == doctest::Approx(u).epsilon(1e-3));
    }
    // The Y CDF is 1 - (1-F) W by construction.
    CHECK(grid.cdf_y(0.0) ==
          doctest::Approx(1.0 - (1.0 - grid.cdf_x(0.0)) *
                                    sol->trajectory.points.front().w).epsilon(1e-9));
}

TEST_CASE("solve rejects the recovered regime") {
    CHECK(!ode::solve(4.0).has_value());
    CHECK(ode::solve(2.0).has_value());
}
