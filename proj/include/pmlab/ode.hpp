#ifndef PMLAB_ODE_HPP
#define PMLAB_ODE_HPP

#include <cstddef>
#include <optional>
#include <vector>

namespace pmlab::ode {

// One sample of the shooting trajectory. u, v, w solve the reduced system;
// f = u*v and g = (1-u)*w are the CDF-side quantities.
struct TrajectoryPoint {
    double x = 0.0;
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    double f = 0.0;
    double g = 0.0;
};

struct Derivs {
    double du = 0.0;
    double dv = 0.0;
    double dw = 0.0;
};

// Right-hand side of the reduced three-dimensional system:
//   u' = -lambda*u*(1-u) + (1-u*v)*(1-(1-u)*w)
//   v' =  lambda*v*(1-u)
//   w' = -lambda*w*u
Derivs rhs(double u, double v, double w, double lambda);

// Error control is effectively relative: W decays like e^{-lambda x} and an
// absolute floor would swamp its precision, breaking the V = W e^{lambda x}
// identity along long trajectories.
struct IntegratorOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
};

// Which boundary the trajectory hits first from U(0)=1/2, V(0)=W(0)=epsilon.
struct BasinClass {
    enum class Kind { EscapedV, EscapedU, Undetermined };
    Kind kind = Kind::Undetermined;
    double x_hit = 0.0;           // first crossing of 1 (escapes) or x_max
    TrajectoryPoint final_point;  // state at x_hit
};

BasinClass integrate_classify(double lambda, double epsilon, double x_max,
                              const IntegratorOptions& opts = {});

// Shooting on epsilon. no_solution is set for lambda >= 4.
struct Epsilon0Result {
    bool no_solution = false;
    double epsilon0 = 0.0;
    double bracket_width = 0.0;
};

Epsilon0Result find_epsilon0(double lambda, const IntegratorOptions& opts = {});

// Dense trajectory on [0, x_T] at uniform spacing dx. x_T is where the
// trajectory either enters the 1e-10 saddle neighborhood or reaches its
// closest approach before double-precision shooting error takes over.
struct Trajectory {
    double lambda = 0.0;
    double epsilon0 = 0.0;
    double dx = 0.0;
    double x_T = 0.0;
    double closest_approach = 0.0;  // min over the grid of max(|1-u|, |1-v|, w)
    std::vector<TrajectoryPoint> points;
};

Trajectory reconstruct_solution(double lambda, double epsilon0, double dx = 0.01,
                                const IntegratorOptions& opts = {});

// Dense samples of the trajectory from an arbitrary epsilon, stopping at
// x_max or when U or V escapes past 1. For invariant and monotonicity
// checks.
std::vector<TrajectoryPoint> sample_path(double lambda, double epsilon, double x_max,
                                         double dx = 0.01, const IntegratorOptions& opts = {});

struct AlphaResult {
    double alpha = 0.0;
    double tail_estimate = 0.0;
    bool tail_warning = false;
};

AlphaResult compute_alpha(const Trajectory& traj);

// Full-line grid of (F, G, V, W) on [-L, L] assembled from the trajectory by
// the symmetry F(-x) = G(x), V(-x) = W(x), with exponential-tail extension
// past x_T. Also serves as the CDF carrier for X (CDF F) and Y
// (CDF 1-(1-F)W).
class CdfGrid {
  public:
    CdfGrid() = default;
    CdfGrid(const Trajectory& traj, double half_width = 55.0);

    double lambda() const { return lambda_; }
    double half_width() const { return half_width_; }
    double dx() const { return dx_; }

    double cdf_x(double x) const;       // F
    double cdf_y(double x) const;       // 1 - (1-F) W
    double sf_x(double x) const;        // 1 - F
    double sf_y(double x) const;        // (1-F) W
    double quantile_x(double u) const;
    double quantile_y(double u) const;

    // Raw grid access, index 0 corresponds to x = -L.
    std::size_t size() const { return f_.size(); }
    double x_at(std::size_t i) const { return -half_width_ + static_cast<double>(i) * dx_; }
    double f_at(std::size_t i) const { return f_[i]; }
    double g_at(std::size_t i) const { return g_[i]; }
    double v_at(std::size_t i) const { return v_[i]; }
    double w_at(std::size_t i) const { return w_[i]; }

  private:
    double lambda_ = 0.0;
    double half_width_ = 0.0;
    double dx_ = 0.0;
    std::vector<double> f_, g_, v_, w_;
    std::vector<double> cdf_y_;  // monotone copy for quantile lookup
};

struct WeightResult {
    double beta_p = 0.0;
    double beta_u = 0.0;
    double tail_estimate = 0.0;
    bool tail_warning = false;
};

WeightResult compute_weight(const Trajectory& traj, const CdfGrid& grid);

struct Diagnostics {
    double bisection_width = 0.0;
    double x_T = 0.0;
    double tail_estimate = 0.0;
    bool tail_warning = false;
};

struct OdeSolution {
    double lambda = 0.0;
    double epsilon0 = 0.0;
    double alpha = 0.0;
    double beta_p = 0.0;
    double beta_u = 0.0;
    Trajectory trajectory;
    Diagnostics diagnostics;
};

// Full pipeline: shoot, reconstruct, integrate. Empty optional means the
// boundary-value problem has no solution (lambda >= 4).
std::optional<OdeSolution> solve(double lambda, double dx = 0.01, const IntegratorOptions& opts = {});

}  // namespace pmlab::ode

#endif
