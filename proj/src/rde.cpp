#include "pmlab/rde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <stdexcept>

#include "pmlab/parallel.hpp"
#include "pmlab/rng.hpp"

namespace pmlab::rde {

namespace {

constexpr std::uint64_t kKindInit = 0xA1;
constexpr std::uint64_t kKindX = 0xA2;
constexpr std::uint64_t kKindY = 0xA3;
constexpr std::uint64_t kKindAlpha = 0xA4;

}  // namespace

RdePool init_pool(double lambda, std::size_t pool_size, std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("init_pool: lambda must be positive");
    if (pool_size < 2) throw std::invalid_argument("init_pool: pool too small");

    RdePool pool;
    pool.lambda = lambda;
    pool.seed = seed;
    pool.iteration = 0;
    pool.x_samples.resize(pool_size);
    pool.y_samples.resize(pool_size);

    const std::uint64_t base = rng::derive(seed, kKindInit);
    for (std::size_t k = 0; k < pool_size; ++k) {
        rng::Stream s(rng::derive(base, k));
        const double u = s.next_unit_co() * (1.0 - 2e-12) + 1e-12;
        pool.x_samples[k] = std::log(u / (1.0 - u));  // standard logistic quantile
    }
    for (std::size_t k = 0; k < pool_size; ++k) {
        rng::Stream s(rng::derive(base + 1, k));
        const double eta = s.next_exponential(lambda);
        const double xa = pool.x_samples[s.next_index(pool_size)];
        const double xb = pool.x_samples[s.next_index(pool_size)];
        pool.y_samples[k] = std::min(eta - xa, xb);
    }
    return pool;
}

RdePool rde_step(const RdePool& pool, unsigned threads) {
    const std::size_t P = pool.pool_size();
    if (P == 0 || pool.y_samples.size() != P) throw std::invalid_argument("rde_step: empty pool");

    // Truncation: arrivals past Z_cut cannot attain the min except with
    // probability below 1e-6 given the exponential upper tail of Y. The
    // running-min stop at zeta > cur_min + max(Y) is exact for this pool.
    std::vector<double> y_sorted(pool.y_samples);
    std::sort(y_sorted.begin(), y_sorted.end());
    const double z_cut = stats::quantile_sorted(y_sorted, 0.9999) + 30.0;
    const double y_max = y_sorted.back();

    RdePool next;
    next.lambda = pool.lambda;
    next.seed = pool.seed;
    next.iteration = pool.iteration + 1;
    next.x_samples.resize(P);
    next.y_samples.resize(P);

    const std::uint64_t step_key = rng::derive(pool.seed, 0x1000 + pool.iteration);
    const std::uint64_t x_key = rng::derive(step_key, kKindX);
    const std::uint64_t y_key = rng::derive(step_key, kKindY);
    const double* ys = pool.y_samples.data();
    const double* xs = pool.x_samples.data();
    const double lambda = pool.lambda;

    parallel_for(0, P, threads, [&](std::size_t k) {
        rng::Stream s(rng::derive(x_key, k));
        double zeta = s.next_exponential(1.0);
        double cur = zeta - ys[s.next_index(P)];
        while (true) {
            zeta += s.next_exponential(1.0);
            if (zeta > z_cut || zeta - y_max > cur) break;
            cur = std::min(cur, zeta - ys[s.next_index(P)]);
        }
        next.x_samples[k] = cur;
    });

    parallel_for(0, P, threads, [&](std::size_t k) {
        rng::Stream s(rng::derive(y_key, k));
        const double eta = s.next_exponential(lambda);
        const double xa = xs[s.next_index(P)];
        const double xb = xs[s.next_index(P)];
        next.y_samples[k] = std::min(eta - xa, xb);
    });

    return next;
}

RdeResult solve_rde(double lambda, std::size_t pool_size, std::uint32_t max_iters,
                    std::uint64_t seed, unsigned threads) {
    if (pool_size < 100) throw std::invalid_argument("solve_rde: pool too small");

    RdeResult res;
    res.pool = init_pool(lambda, pool_size, seed);

    const double threshold = 5.0 / std::sqrt(static_cast<double>(pool_size));
    std::deque<std::vector<double>> window;  // sorted X pools of the last 10 iterations
    auto sorted_x = [](const RdePool& p) {
        std::vector<double> v(p.x_samples);
        std::sort(v.begin(), v.end());
        return v;
    };
    window.push_back(sorted_x(res.pool));

    int consecutive = 0;
    for (std::uint32_t it = 1; it <= max_iters; ++it) {
        res.pool = rde_step(res.pool, threads);
        res.iterations = it;
        std::vector<double> cur = sorted_x(res.pool);

        res.ks_trace.push_back(stats::ks_two_sample(window.back(), cur));
        if (window.size() >= 10) {
            const double ks10 = stats::ks_two_sample(window.front(), cur);
            consecutive = ks10 < threshold ? consecutive + 1 : 0;
        }
        window.push_back(std::move(cur));
        if (window.size() > 10) window.pop_front();

        if (consecutive >= 3) {
            res.converged = true;
            break;
        }
    }
    return res;
}

AlphaEstimate estimate_alpha_from_samples(const stats::SampledDistribution& x_pool, double lambda,
                                          std::uint64_t draws, std::uint64_t seed) {
    if (draws == 0) throw std::invalid_argument("estimate_alpha_from_samples: draws must be positive");
    const auto& xs = x_pool.sorted_samples();
    const std::size_t P = xs.size();
    rng::Stream s(rng::derive(seed, kKindAlpha));
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        const double eta = s.next_exponential(lambda);
        const double xa = xs[s.next_index(P)];
        const double xb = xs[s.next_index(P)];
        if (eta < xa + xb) ++hits;
    }
    AlphaEstimate est;
    est.draws = draws;
    est.estimate = static_cast<double>(hits) / static_cast<double>(draws);
    est.stderr_est = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(draws));
    return est;
}

std::string dump_pool(const RdePool& pool, char kind) {
    if (kind != 'X' && kind != 'Y') throw std::invalid_argument("dump_pool: kind must be X or Y");
    const auto& samples = kind == 'X' ? pool.x_samples : pool.y_samples;
    std::string out;
    out.reserve(samples.size() * 20 + 64);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# rde lambda=%.12g iter=%u kind=%c\n", pool.lambda,
                  pool.iteration, kind);
    out += buf;
    for (double v : samples) {
        std::snprintf(buf, sizeof(buf), "%.12g\n", v);
        out += buf;
    }
    return out;
}

void save_pool(const RdePool& pool, char kind, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    const std::string text = dump_pool(pool, kind);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace pmlab::rde
