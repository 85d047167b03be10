#include "pmlab/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pmlab::ode {

Derivs rhs(double u, double v, double w, double lambda) {
    Derivs d;
    d.du = -lambda * u * (1.0 - u) + (1.0 - u * v) * (1.0 - (1.0 - u) * w);
    d.dv = lambda * v * (1.0 - u);
    d.dw = -lambda * w * u;
    return d;
}

namespace {

using State = std::array<double, 3>;  // (u, v, w)

State eval(const State& y, double lambda) {
    const Derivs d = rhs(y[0], y[1], y[2], lambda);
    return {d.du, d.dv, d.dw};
}

// Dormand-Prince 5(4) with Hairer's 4th-order dense output.
struct Dopri5 {
    double lambda;
    IntegratorOptions opts;

    double x = 0.0;
    State y{};
    State k1{};  // FSAL derivative at (x, y)
    double h = 1e-4;

    // Last accepted step, for dense output.
    double x_prev = 0.0;
    double h_last = 0.0;
    State rcont1{}, rcont2{}, rcont3{}, rcont4{}, rcont5{};

    void init(double x0, const State& y0) {
        x = x0;
        y = y0;
        k1 = eval(y, lambda);
        h = 1e-4;
    }

    // Advance one accepted step; returns false never (throws on underflow).
    void step() {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        static constexpr double d1 = -12715105075.0 / 11282082432.0,
                                d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0,
                                d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

        for (int attempt = 0;; ++attempt) {
            if (h < 1e-14 * std::max(1.0, std::abs(x)))
                throw std::runtime_error("ode: step size underflow at x=" + std::to_string(x) +
                                         " u=" + std::to_string(y[0]) + " v=" + std::to_string(y[1]) +
                                         " w=" + std::to_string(y[2]));
            State y2, y3, y4, y5, y6, y7;
            State k2, k3, k4, k5, k6, k7;
            for (int i = 0; i < 3; ++i) y2[i] = y[i] + h * a21 * k1[i];
            k2 = eval(y2, lambda);
            for (int i = 0; i < 3; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = eval(y3, lambda);
            for (int i = 0; i < 3; ++i) y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = eval(y4, lambda);
            for (int i = 0; i < 3; ++i)
                y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = eval(y5, lambda);
            for (int i = 0; i < 3; ++i)
                y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = eval(y6, lambda);
            for (int i = 0; i < 3; ++i)
                y7[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            k7 = eval(y7, lambda);

            double err = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
                const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y7[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / 3.0);

            if (err <= 1.0 || !std::isfinite(err)) {
                if (!std::isfinite(err)) {
                    // Blow-up inside the trial step: shrink instead of accepting.
                    h *= 0.25;
                    continue;
                }
                // Accept. Prepare dense output.
                x_prev = x;
                h_last = h;
                for (int i = 0; i < 3; ++i) {
                    const double dy = y7[i] - y[i];
                    rcont1[i] = y[i];
                    rcont2[i] = dy;
                    rcont3[i] = h * k1[i] - dy;
                    rcont4[i] = dy - h * k7[i] - rcont3[i];
                    rcont5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
                }
                x += h;
                y = y7;
                k1 = k7;  // FSAL
                const double fac = std::clamp(0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.2), 0.2, 5.0);
                h = std::min(h * fac, 1.0);
                return;
            }
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            (void)attempt;
        }
    }

    State dense(double xq) const {
        const double theta = (xq - x_prev) / h_last;
        const double theta1 = 1.0 - theta;
        State out;
        for (int i = 0; i < 3; ++i)
            out[i] = rcont1[i] +
                     theta * (rcont2[i] +
                              theta1 * (rcont3[i] + theta * (rcont4[i] + theta1 * rcont5[i])));
        return out;
    }
};

TrajectoryPoint make_point(double x, const State& y) {
    TrajectoryPoint p;
    p.x = x;
    p.u = y[0];
    p.v = y[1];
    p.w = y[2];
    p.f = y[0] * y[1];
    p.g = (1.0 - y[0]) * y[2];
    return p;
}

// Smallest x in (x_prev, x_prev+h] where component idx crosses level, by
// bisection on the dense interpolant. Assumes it is >= level at the end.
double locate_crossing(const Dopri5& ig, int idx, double level) {
    double lo = ig.x_prev, hi = ig.x_prev + ig.h_last;
    for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ig.dense(mid)[idx] >= level)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double saddle_distance(const State& y) {
    return std::max({std::abs(1.0 - y[0]), std::abs(1.0 - y[1]), std::abs(y[2])});
}

constexpr double kXMaxCap = 1e4;

double initial_x_max(double lambda) { return 50.0 / lambda + 50.0; }

}  // namespace

BasinClass integrate_classify(double lambda, double epsilon, double x_max,
                              const IntegratorOptions& opts) {
    if (!(lambda > 0.0)) throw std::invalid_argument("integrate_classify: lambda must be positive");
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("integrate_classify: epsilon must lie in [0, 1]");
    if (!(x_max > 0.0)) throw std::invalid_argument("integrate_classify: x_max must be positive");

    BasinClass out;
    if (epsilon >= 1.0) {
        out.kind = BasinClass::Kind::EscapedV;
        out.x_hit = 0.0;
        out.final_point = make_point(0.0, {0.5, 1.0, 1.0});
        return out;
    }

    Dopri5 ig{lambda, opts};
    ig.init(0.0, {0.5, epsilon, epsilon});

    while (ig.x < x_max) {
        ig.step();
        const bool hit_u = ig.y[0] >= 1.0;
        const bool hit_v = ig.y[1] >= 1.0;
        if (hit_u || hit_v) {
            const double xu = hit_u ? locate_crossing(ig, 0, 1.0) : std::numeric_limits<double>::infinity();
            const double xv = hit_v ? locate_crossing(ig, 1, 1.0) : std::numeric_limits<double>::infinity();
            out.kind = xv <= xu ? BasinClass::Kind::EscapedV : BasinClass::Kind::EscapedU;
            out.x_hit = std::min(xu, xv);
            out.final_point = make_point(out.x_hit, ig.dense(out.x_hit));
            return out;
        }
    }
    out.kind = BasinClass::Kind::Undetermined;
    out.x_hit = ig.x;
    out.final_point = make_point(ig.x, ig.y);
    return out;
}

namespace {

// Classify with the doubling x_max schedule.
BasinClass classify_scheduled(double lambda, double epsilon, const IntegratorOptions& opts) {
    double x_max = initial_x_max(lambda);
    while (true) {
        BasinClass c = integrate_classify(lambda, epsilon, x_max, opts);
        if (c.kind != BasinClass::Kind::Undetermined || x_max >= kXMaxCap) return c;
        x_max = std::min(2.0 * x_max, kXMaxCap);
    }
}

}  // namespace

Epsilon0Result find_epsilon0(double lambda, const IntegratorOptions& opts) {
    if (!(lambda > 0.0)) throw std::invalid_argument("find_epsilon0: lambda must be positive");
    Epsilon0Result res;
    if (lambda >= 4.0) {
        // At u = 1/2 the drift is -lambda/4 + (1-f)(1-g) <= 0, so u never
        // reaches 1 and the boundary-value problem has no solution.
        res.no_solution = true;
        return res;
    }

    // Closed-form endpoints: epsilon = 0 escapes through U, epsilon = 1
    // through V, so [0, 1] brackets the change point.
    double lo = 0.0, hi = 1.0;
    const double eps_rel = 4.0 * std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= eps_rel * mid) break;
        const BasinClass c = classify_scheduled(lambda, mid, opts);
        if (c.kind == BasinClass::Kind::EscapedU)
            lo = mid;
        else if (c.kind == BasinClass::Kind::EscapedV)
            hi = mid;
        else
            break;  // unresolved at the x_max cap; keep the current bracket
    }
    res.epsilon0 = 0.5 * (lo + hi);
    res.bracket_width = hi - lo;
    return res;
}

Trajectory reconstruct_solution(double lambda, double epsilon0, double dx,
                                const IntegratorOptions& opts) {
    if (!(lambda > 0.0) || lambda >= 4.0)
        throw std::invalid_argument("reconstruct_solution: lambda must lie in (0, 4)");
    if (!(epsilon0 > 0.0 && epsilon0 < 1.0))
        throw std::invalid_argument("reconstruct_solution: epsilon0 must lie in (0, 1)");
    if (!(dx > 0.0)) throw std::invalid_argument("reconstruct_solution: dx must be positive");

    Trajectory traj;
    traj.lambda = lambda;
    traj.epsilon0 = epsilon0;
    traj.dx = dx;

    Dopri5 ig{lambda, opts};
    State y0{0.5, epsilon0, epsilon0};
    ig.init(0.0, y0);
    traj.points.push_back(make_point(0.0, y0));

    constexpr double kSaddleTol = 1e-10;
    constexpr double kEscape = 1.0 + 1e-9;

    std::size_t next = 1;
    std::size_t best_idx = 0;
    double best_d = saddle_distance(y0);
    bool reached_saddle = false;

    while (ig.x < kXMaxCap) {
        ig.step();
        // Emit grid samples covered by this step.
        while (static_cast<double>(next) * dx <= ig.x + 1e-15) {
            const double xq = static_cast<double>(next) * dx;
            const State ys = ig.dense(std::min(xq, ig.x));
            traj.points.push_back(make_point(xq, ys));
            const double d = saddle_distance(ys);
            if (d < best_d) {
                best_d = d;
                best_idx = traj.points.size() - 1;
            }
            ++next;
            if (d < kSaddleTol) {
                reached_saddle = true;
                break;
            }
        }
        if (reached_saddle) break;
        if (ig.y[0] >= kEscape || ig.y[1] >= kEscape) break;  // shooting precision exhausted
    }

    if (best_d > 3e-3)
        throw std::runtime_error(
            "reconstruct_solution: trajectory escaped before the saddle neighborhood; reachable x_T=" +
            std::to_string(traj.points[best_idx].x));

    traj.points.resize(best_idx + 1);
    traj.x_T = traj.points.back().x;
    traj.closest_approach = best_d;
    return traj;
}

std::vector<TrajectoryPoint> sample_path(double lambda, double epsilon, double x_max, double dx,
                                         const IntegratorOptions& opts) {
    if (!(lambda > 0.0) || epsilon < 0.0 || epsilon > 1.0 || !(x_max > 0.0) || !(dx > 0.0))
        throw std::invalid_argument("sample_path: bad parameters");
    Dopri5 ig{lambda, opts};
    State y0{0.5, epsilon, epsilon};
    ig.init(0.0, y0);
    std::vector<TrajectoryPoint> out;
    out.push_back(make_point(0.0, y0));
    std::size_t next = 1;
    while (ig.x < x_max) {
        ig.step();
        while (static_cast<double>(next) * dx <= ig.x + 1e-15) {
            const double xq = static_cast<double>(next) * dx;
            if (xq > x_max) return out;
            out.push_back(make_point(xq, ig.dense(std::min(xq, ig.x))));
            ++next;
        }
        if (ig.y[0] >= 1.0 + 1e-6 || ig.y[1] >= 1.0 + 1e-6) break;
    }
    return out;
}

AlphaResult compute_alpha(const Trajectory& traj) {
    const auto& pts = traj.points;
    if (pts.size() < 3) throw std::invalid_argument("compute_alpha: trajectory too short");

    auto integrand = [](const TrajectoryPoint& p) {
        return (1.0 - p.f) * (1.0 - p.g) * p.v * p.w;
    };

    // Composite Simpson on the uniform grid; trapezoid patch on a trailing
    // odd interval.
    const double h = traj.dx;
    double integral = 0.0;
    std::size_t m = pts.size() - 1;
    std::size_t last_even = (m % 2 == 0) ? m : m - 1;
    for (std::size_t i = 0; i + 2 <= last_even; i += 2)
        integral += (h / 3.0) * (integrand(pts[i]) + 4.0 * integrand(pts[i + 1]) + integrand(pts[i + 2]));
    if (last_even != m)
        integral += 0.5 * h * (integrand(pts[m - 1]) + integrand(pts[m]));

    // Past x_T: 1-F and 1-G decay at rate 1, W at rate lambda, V -> 1.
    const TrajectoryPoint& t = pts.back();
    const double tail = integrand(t) / (1.0 + traj.lambda);

    AlphaResult res;
    res.tail_estimate = tail;
    res.tail_warning = integral > 0.0 && tail > 1e-6 * integral;
    res.alpha = 1.0 - 2.0 * (integral + tail);
    return res;
}

CdfGrid::CdfGrid(const Trajectory& traj, double half_width) {
    lambda_ = traj.lambda;
    dx_ = traj.dx;
    half_width_ = half_width;
    const std::size_t m = static_cast<std::size_t>(std::llround(half_width_ / dx_));
    half_width_ = static_cast<double>(m) * dx_;
    const std::size_t total = 2 * m + 1;
    f_.resize(total);
    g_.resize(total);
    v_.resize(total);
    w_.resize(total);

    const auto& pts = traj.points;
    const std::size_t traj_last = pts.size() - 1;
    const TrajectoryPoint& t = pts.back();

    // Positive half from the trajectory, extended by the saddle tail model
    // beyond x_T.
    for (std::size_t k = 0; k <= m; ++k) {
        double F, G, V, W;
        if (k <= traj_last) {
            F = pts[k].f;
            G = pts[k].g;
            V = pts[k].v;
            W = pts[k].w;
        } else {
            const double s = (static_cast<double>(k) - static_cast<double>(traj_last)) * dx_;
            F = 1.0 - (1.0 - t.f) * std::exp(-s);
            G = t.g * std::exp(-(1.0 + lambda_) * s);
            V = 1.0 - (1.0 - t.v) * std::exp(-s);
            W = t.w * std::exp(-lambda_ * s);
        }
        f_[m + k] = F;
        g_[m + k] = G;
        v_[m + k] = V;
        w_[m + k] = W;
    }
    // Negative half by symmetry.
    for (std::size_t k = 1; k <= m; ++k) {
        f_[m - k] = g_[m + k];
        g_[m - k] = f_[m + k];
        v_[m - k] = w_[m + k];
        w_[m - k] = v_[m + k];
    }

    cdf_y_.resize(total);
    for (std::size_t i = 0; i < total; ++i) cdf_y_[i] = 1.0 - (1.0 - f_[i]) * w_[i];
    // Guard monotonicity against float noise for the quantile lookups.
    for (std::size_t i = 1; i < total; ++i) {
        if (f_[i] < f_[i - 1]) f_[i] = f_[i - 1];
        if (cdf_y_[i] < cdf_y_[i - 1]) cdf_y_[i] = cdf_y_[i - 1];
    }
}

namespace {

double interp_grid(const std::vector<double>& ys, double x, double lo, double dx) {
    const double pos = (x - lo) / dx;
    if (pos <= 0.0) return ys.front();
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= ys.size()) return ys.back();
    const double frac = pos - static_cast<double>(i);
    return ys[i] + frac * (ys[i + 1] - ys[i]);
}

double quantile_grid(const std::vector<double>& cdf, double u, double lo, double dx) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return lo;
    if (it == cdf.end()) return lo + dx * static_cast<double>(cdf.size() - 1);
    const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    const double c0 = cdf[i - 1], c1 = cdf[i];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return lo + dx * (static_cast<double>(i - 1) + frac);
}

}  // namespace

double CdfGrid::cdf_x(double x) const {
    if (x < -half_width_) return f_.front() * std::exp((1.0 + lambda_) * (x + half_width_));
    if (x > half_width_) return 1.0 - (1.0 - f_.back()) * std::exp(-(x - half_width_));
    return interp_grid(f_, x, -half_width_, dx_);
}

double CdfGrid::sf_x(double x) const {
    if (x > half_width_) return (1.0 - f_.back()) * std::exp(-(x - half_width_));
    return 1.0 - cdf_x(x);
}

double CdfGrid::cdf_y(double x) const {
    if (x < -half_width_) return cdf_y_.front() * std::exp(x + half_width_);
    if (x > half_width_) return 1.0 - (1.0 - cdf_y_.back()) * std::exp(-(1.0 + lambda_) * (x - half_width_));
    return interp_grid(cdf_y_, x, -half_width_, dx_);
}

double CdfGrid::sf_y(double x) const {
    if (x > half_width_) return (1.0 - cdf_y_.back()) * std::exp(-(1.0 + lambda_) * (x - half_width_));
    return 1.0 - cdf_y(x);
}

double CdfGrid::quantile_x(double u) const {
    if (u <= 0.0 || u >= 1.0) throw std::invalid_argument("quantile_x: u must lie in (0, 1)");
    if (u < f_.front()) return -half_width_ + std::log(u / f_.front()) / (1.0 + lambda_);
    if (u > f_.back()) return half_width_ - std::log((1.0 - u) / (1.0 - f_.back()));
    return quantile_grid(f_, u, -half_width_, dx_);
}

double CdfGrid::quantile_y(double u) const {
    if (u <= 0.0 || u >= 1.0) throw std::invalid_argument("quantile_y: u must lie in (0, 1)");
    if (u < cdf_y_.front()) return -half_width_ + std::log(u / cdf_y_.front());
    if (u > cdf_y_.back())
        return half_width_ - std::log((1.0 - u) / (1.0 - cdf_y_.back())) / (1.0 + lambda_);
    return quantile_grid(cdf_y_, u, -half_width_, dx_);
}

WeightResult compute_weight(const Trajectory& traj, const CdfGrid& grid) {
    const double lambda = traj.lambda;
    const double h = grid.dx();
    const double L = grid.half_width();
    const std::size_t n = grid.size();

    // Densities of X and Y on the full-line grid.
    std::vector<double> fx(n), fy(n), sfx(n), sfy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double F = grid.f_at(i), G = grid.g_at(i), V = grid.v_at(i), W = grid.w_at(i);
        fx[i] = (1.0 - F) * (1.0 - G) * V;
        fy[i] = (1.0 - F) * ((1.0 - G) * V * W - lambda * (G - W));
        if (fy[i] < 0.0) fy[i] = 0.0;  // float noise near the tails
        sfx[i] = 1.0 - F;
        sfy[i] = (1.0 - F) * W;
    }

    const double sfx_end = sfx.back();
    const double sfy_end = sfy.back();
    double tail_total = 0.0;

    // Inner integral for the planted part: Ip(x) = int_0^inf lambda t e^{-lambda t} sfx(t - x) dt.
    // The grid covers s = t - x in [-L, L]; past +L the survival function is
    // extended exponentially, with the remainder in closed form.
    auto inner_planted = [&](double x, double& tail_acc) {
        const double t_hi = x + L;
        double acc = 0.0;
        const std::size_t steps = static_cast<std::size_t>(t_hi / h);
        double prev = 0.0;  // integrand at t = 0 is 0
        for (std::size_t k = 1; k <= steps; ++k) {
            const double t = static_cast<double>(k) * h;
            const double s = t - x;
            const double val = lambda * t * std::exp(-lambda * t) *
                               (s <= L ? 1.0 - grid.cdf_x(s) : sfx_end * std::exp(-(s - L)));
            acc += 0.5 * (prev + val) * h;
            prev = val;
        }
        // Closed-form remainder for t > x + L with sfx(s) = sfx_end e^{-(s-L)}.
        const double b = t_hi;
        if (b > 0.0) {
            const double r = lambda + 1.0;
            const double tail =
                sfx_end * lambda * std::exp(-lambda * b) * (b / r + 1.0 / (r * r));
            acc += tail;
            tail_acc += tail;
        }
        return acc;
    };

    // Inner integral for the un-planted part: Iu(y) = int_0^inf t sfy(t - y) dt.
    auto inner_unplanted = [&](double y, double& tail_acc) {
        const double t_hi = y + L;
        double acc = 0.0;
        const std::size_t steps = static_cast<std::size_t>(t_hi / h);
        double prev = 0.0;
        for (std::size_t k = 1; k <= steps; ++k) {
            const double t = static_cast<double>(k) * h;
            const double s = t - y;
            const double val = t * (s <= L ? grid.sf_y(s) : sfy_end * std::exp(-(1.0 + lambda) * (s - L)));
            acc += 0.5 * (prev + val) * h;
            prev = val;
        }
        const double b = t_hi;
        if (b > 0.0) {
            const double r = 1.0 + lambda;
            const double tail = sfy_end * (b / r + 1.0 / (r * r));
            acc += tail;
            tail_acc += tail;
        }
        return acc;
    };

    double beta_p = 0.0, beta_u = 0.0;
    double inner_tail = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x_at(i);
        const double wq = (i == 0 || i + 1 == n) ? 0.5 * h : h;  // trapezoid weights
        if (fx[i] > 1e-300) {
            double tacc = 0.0;
            beta_p += wq * fx[i] * inner_planted(x, tacc);
            inner_tail += wq * fx[i] * tacc;
        }
        if (fy[i] > 1e-300) {
            double tacc = 0.0;
            beta_u += wq * fy[i] * inner_unplanted(x, tacc);
            inner_tail += wq * fy[i] * tacc;
        }
    }
    tail_total += inner_tail;

    WeightResult res;
    res.beta_p = beta_p;
    res.beta_u = beta_u;
    res.tail_estimate = tail_total;
    res.tail_warning = tail_total > 1e-6 * (beta_p + beta_u);
    return res;
}

std::optional<OdeSolution> solve(double lambda, double dx, const IntegratorOptions& opts) {
    const Epsilon0Result eps = find_epsilon0(lambda, opts);
    if (eps.no_solution) return std::nullopt;

    Trajectory traj = reconstruct_solution(lambda, eps.epsilon0, dx, opts);
    const AlphaResult a = compute_alpha(traj);
    const CdfGrid grid(traj);
    const WeightResult w = compute_weight(traj, grid);

    OdeSolution sol;
    sol.lambda = lambda;
    sol.epsilon0 = eps.epsilon0;
    sol.alpha = a.alpha;
    sol.beta_p = w.beta_p;
    sol.beta_u = w.beta_u;
    sol.diagnostics.bisection_width = eps.bracket_width;
    sol.diagnostics.x_T = traj.x_T;
    sol.diagnostics.tail_estimate = a.tail_estimate + w.tail_estimate;
    sol.diagnostics.tail_warning = a.tail_warning || w.tail_warning;
    sol.trajectory = std::move(traj);
    return sol;
}

}  // namespace pmlab::ode
