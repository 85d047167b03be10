#ifndef PMLAB_RDE_HPP
#define PMLAB_RDE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pmlab/stats.hpp"

namespace pmlab::rde {

// Sample pools for the message distributions X and Y.
struct RdePool {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::uint32_t iteration = 0;
    std::vector<double> x_samples;
    std::vector<double> y_samples;

    std::size_t pool_size() const { return x_samples.size(); }
};

// X pool starts from the standard logistic fixed point of the un-planted
// problem; Y pool from one Y-update applied to it.
RdePool init_pool(double lambda, std::size_t pool_size, std::uint64_t seed);

// One synchronous population-dynamics step: every X sample becomes
// min over Poisson(1) arrivals zeta <= Z_cut of (zeta - Y), every Y sample
// becomes min(eta - X, X') with eta ~ exp(lambda). Z_cut is recomputed from
// the current Y pool as its 0.9999 quantile + 30.
RdePool rde_step(const RdePool& pool, unsigned threads = 1);

struct RdeResult {
    RdePool pool;
    std::vector<double> ks_trace;  // KS between consecutive X pools, one per step
    bool converged = false;
    std::uint32_t iterations = 0;
};

// Iterate rde_step until the convergence criterion (KS between pools ten
// iterations apart below 5/sqrt(pool) for three consecutive checks) or the
// iteration cap. converged=false signals a convergence failure.
RdeResult solve_rde(double lambda, std::size_t pool_size, std::uint32_t max_iters,
                    std::uint64_t seed, unsigned threads = 1);

struct AlphaEstimate {
    double estimate = 0.0;
    double stderr_est = 0.0;
    std::uint64_t draws = 0;
};

// Monte Carlo estimate of P[eta < X + X'] with eta ~ exp(lambda) and X, X'
// resampled independently from the pool.
AlphaEstimate estimate_alpha_from_samples(const stats::SampledDistribution& x_pool, double lambda,
                                          std::uint64_t draws, std::uint64_t seed);

// Pool dump: "# rde lambda=<v> iter=<k> kind=<X|Y>" header, one sample per
// line, LF endings.
std::string dump_pool(const RdePool& pool, char kind);
void save_pool(const RdePool& pool, char kind, const std::string& path);

}  // namespace pmlab::rde

#endif
