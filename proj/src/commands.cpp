#include "pmlab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "pmlab/bounds.hpp"
#include "pmlab/manifest.hpp"
#include "pmlab/matching.hpp"
#include "pmlab/model.hpp"
#include "pmlab/ode.hpp"
#include "pmlab/parallel.hpp"
#include "pmlab/pwit.hpp"
#include "pmlab/rde.hpp"
#include "pmlab/rng.hpp"

namespace pmlab::commands {

std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

unsigned resolve_threads(unsigned t) { return t == 0 ? default_threads() : t; }

struct TrialStats {
    double overlap = 0.0;
    double weight_per_n = 0.0;
    double sym_diff = 0.0;
    double n_cycles = 0.0;
};

TrialStats run_trial(std::uint32_t n, double lambda, std::uint64_t trial_seed) {
    const model::PlantedInstance inst = model::generate(n, lambda, trial_seed);
    matching::MatchingResult res = matching::solve_min_matching(inst);
    res.cycles = matching::decompose_symmetric_difference(inst, res);
    TrialStats t;
    t.overlap = matching::overlap(res, n);
    t.weight_per_n = res.weight / static_cast<double>(n);
    t.sym_diff = 2.0 * static_cast<double>(n - res.overlap_count);
    t.n_cycles = static_cast<double>(res.cycles.size());
    return t;
}

}  // namespace

int cmd_alpha(const AlphaOptions& opts) {
    if (!(opts.lambda_min > 0.0) || !(opts.lambda_max >= opts.lambda_min) || opts.steps < 1) {
        std::cerr << "alpha: need 0 < lambda-min <= lambda-max and steps >= 1\n";
        return kParamError;
    }
    if (opts.lambda_max >= 4.0) {
        std::cerr << "alpha: lambda >= 4 has no ODE solution (almost perfect recovery regime); "
                     "use `bound` for that range\n";
        return kNoSolution;
    }
    if (opts.out_path.empty()) {
        std::cerr << "alpha: --out is required\n";
        return kParamError;
    }
    const unsigned threads = resolve_threads(opts.threads);
    manifest::RunManifest man;
    man.command = "alpha";
    man.started_at = manifest::iso_timestamp_now();
    man.seed = opts.seed;
    man.params = {{"lambda_min", format_sig12(opts.lambda_min)},
                  {"lambda_max", format_sig12(opts.lambda_max)},
                  {"steps", std::to_string(opts.steps)},
                  {"mc_n", std::to_string(opts.mc_n)},
                  {"mc_trials", std::to_string(opts.mc_trials)}};

    std::string csv = "lambda,epsilon0,alpha_ode,beta_p,beta_u,alpha_mc,alpha_mc_stderr,n_mc,trials\n";
    for (std::uint32_t k = 0; k < opts.steps; ++k) {
        const double lambda =
            opts.steps == 1
                ? opts.lambda_min
                : opts.lambda_min + (opts.lambda_max - opts.lambda_min) * static_cast<double>(k) /
                                        static_cast<double>(opts.steps - 1);
        const auto sol = ode::solve(lambda);
        if (!sol) {
            std::cerr << "alpha: no solution at lambda=" << lambda << "\n";
            return kNoSolution;
        }
        csv += format_sig12(lambda);
        csv += ',' + format_sig12(sol->epsilon0);
        csv += ',' + format_sig12(sol->alpha);
        csv += ',' + format_sig12(sol->beta_p);
        csv += ',' + format_sig12(sol->beta_u);
        if (opts.mc_n > 0 && opts.mc_trials > 0) {
            std::vector<double> overlaps(opts.mc_trials);
            const std::uint64_t base = rng::derive(rng::derive(opts.seed, 0xA1FA), k);
            parallel_for(0, opts.mc_trials, threads, [&](std::size_t t) {
                overlaps[t] = run_trial(opts.mc_n, lambda, rng::derive(base, t)).overlap;
            });
            const auto s = stats::summarize(overlaps);
            csv += ',' + format_sig12(s.mean);
            csv += ',' + format_sig12(s.stderr_mean);
            csv += ',' + std::to_string(opts.mc_n);
            csv += ',' + std::to_string(opts.mc_trials);
        } else {
            csv += ",,,,";
        }
        csv += '\n';
        std::cout << "lambda=" << format_sig12(lambda) << " epsilon0=" << format_sig12(sol->epsilon0)
                  << " alpha=" << format_sig12(sol->alpha)
                  << " beta_p+beta_u=" << format_sig12(sol->beta_p + sol->beta_u) << "\n";
    }
    write_text_file(opts.out_path, csv);
    man.outputs = {opts.out_path};
    man.finished_at = manifest::iso_timestamp_now();
    manifest::write_manifest(man, opts.out_path + ".manifest.json");
    return kOk;
}

int cmd_simulate(const SimulateOptions& opts) {
    if (opts.n < 2 || opts.trials < 1) {
        std::cerr << "simulate: need n >= 2 and trials >= 1\n";
        return kParamError;
    }
    if (opts.out_path.empty()) {
        std::cerr << "simulate: --out is required\n";
        return kParamError;
    }
    const unsigned threads = resolve_threads(opts.threads);
    manifest::RunManifest man;
    man.command = "simulate";
    man.started_at = manifest::iso_timestamp_now();
    man.seed = opts.seed;
    man.params = {{"n", std::to_string(opts.n)},
                  {"lambda", format_sig12(opts.lambda)},
                  {"trials", std::to_string(opts.trials)}};

    std::vector<TrialStats> rows(opts.trials);
    const std::uint64_t base = rng::derive(opts.seed, 0x51);
    parallel_for(0, opts.trials, threads, [&](std::size_t t) {
        rows[t] = run_trial(opts.n, opts.lambda, rng::derive(base, t));
    });

    std::string csv = "trial,overlap,weight_per_n,sym_diff,n_cycles\n";
    std::vector<double> ov, wn, sd, nc;
    for (std::uint32_t t = 0; t < opts.trials; ++t) {
        const auto& r = rows[t];
        csv += std::to_string(t) + ',' + format_sig12(r.overlap) + ',' + format_sig12(r.weight_per_n) +
               ',' + format_sig12(r.sym_diff) + ',' + format_sig12(r.n_cycles) + '\n';
        ov.push_back(r.overlap);
        wn.push_back(r.weight_per_n);
        sd.push_back(r.sym_diff);
        nc.push_back(r.n_cycles);
    }
    const auto sov = stats::summarize(ov), swn = stats::summarize(wn), ssd = stats::summarize(sd),
               snc = stats::summarize(nc);
    csv += "mean," + format_sig12(sov.mean) + ',' + format_sig12(swn.mean) + ',' +
           format_sig12(ssd.mean) + ',' + format_sig12(snc.mean) + '\n';
    csv += "stderr," + format_sig12(sov.stderr_mean) + ',' + format_sig12(swn.stderr_mean) + ',' +
           format_sig12(ssd.stderr_mean) + ',' + format_sig12(snc.stderr_mean) + '\n';
    write_text_file(opts.out_path, csv);

    std::cout << "simulate: n=" << opts.n << " lambda=" << format_sig12(opts.lambda)
              << " mean_overlap=" << format_sig12(sov.mean)
              << " mean_weight_per_n=" << format_sig12(swn.mean) << "\n";

    man.outputs = {opts.out_path};
    man.finished_at = manifest::iso_timestamp_now();
    manifest::write_manifest(man, opts.out_path + ".manifest.json");
    return kOk;
}

int cmd_rde(const RdeOptions& opts) {
    if (opts.pool < 10000) {
        std::cerr << "rde: pool must be >= 10000\n";
        return kParamError;
    }
    if (!(opts.lambda > 0.0) || opts.lambda >= 4.0) {
        std::cerr << "rde: lambda must lie in (0, 4)\n";
        return opts.lambda >= 4.0 ? kNoSolution : kParamError;
    }
    if (opts.out_path.empty()) {
        std::cerr << "rde: --out is required\n";
        return kParamError;
    }
    const unsigned threads = resolve_threads(opts.threads);
    manifest::RunManifest man;
    man.command = "rde";
    man.started_at = manifest::iso_timestamp_now();
    man.seed = opts.seed;
    man.params = {{"lambda", format_sig12(opts.lambda)},
                  {"pool", std::to_string(opts.pool)},
                  {"iters", std::to_string(opts.iters)}};

    const rde::RdeResult res = rde::solve_rde(opts.lambda, opts.pool, opts.iters, opts.seed, threads);

    std::string csv = "iter,ks_step\n";
    for (std::size_t i = 0; i < res.ks_trace.size(); ++i)
        csv += std::to_string(i + 1) + ',' + format_sig12(res.ks_trace[i]) + '\n';
    write_text_file(opts.out_path, csv);
    rde::save_pool(res.pool, 'X', opts.out_path + ".xpool");
    rde::save_pool(res.pool, 'Y', opts.out_path + ".ypool");

    man.outputs = {opts.out_path, opts.out_path + ".xpool", opts.out_path + ".ypool"};
    man.finished_at = manifest::iso_timestamp_now();
    manifest::write_manifest(man, opts.out_path + ".manifest.json");

    if (!res.converged) {
        std::cerr << "rde: did not converge within " << opts.iters << " iterations\n";
        return kConvergenceError;
    }

    const stats::SampledDistribution xd(res.pool.x_samples);
    const auto alpha = rde::estimate_alpha_from_samples(xd, opts.lambda, 20000,
                                                        rng::derive(opts.seed, 0xE57));
    std::cout << "rde: converged after " << res.iterations << " iterations\n";
    std::cout << "rde: alpha_direct=" << format_sig12(alpha.estimate) << " +- "
              << format_sig12(alpha.stderr_est) << "\n";

    const auto sol = ode::solve(opts.lambda);
    if (sol) {
        const ode::CdfGrid grid(sol->trajectory);
        const double ks_x =
            stats::ks_vs_cdf(res.pool.x_samples, [&](double x) { return grid.cdf_x(x); });
        const double ks_y =
            stats::ks_vs_cdf(res.pool.y_samples, [&](double x) { return grid.cdf_y(x); });
        std::cout << "rde: ks_x_vs_ode=" << format_sig12(ks_x) << " ks_y_vs_ode=" << format_sig12(ks_y)
                  << " (ode alpha=" << format_sig12(sol->alpha) << ")\n";
    }
    return kOk;
}

int cmd_pwit(const PwitOptions& opts) {
    if (!(opts.lambda > 0.0) || opts.lambda >= 4.0) {
        std::cerr << "pwit: lambda must lie in (0, 4)\n";
        return opts.lambda >= 4.0 ? kNoSolution : kParamError;
    }
    if (opts.out_path.empty()) {
        std::cerr << "pwit: --out is required\n";
        return kParamError;
    }
    if (opts.boundary != "ode" && opts.boundary != "rde") {
        std::cerr << "pwit: --boundary must be ode or rde\n";
        return kParamError;
    }
    const unsigned threads = resolve_threads(opts.threads);
    manifest::RunManifest man;
    man.command = "pwit";
    man.started_at = manifest::iso_timestamp_now();
    man.seed = opts.seed;
    man.params = {{"lambda", format_sig12(opts.lambda)}, {"depth", std::to_string(opts.depth)},
                  {"arity", std::to_string(opts.arity)}, {"trials", std::to_string(opts.trials)},
                  {"boundary", opts.boundary}};

    pwit::BoundarySampler boundary = [&] {
        if (opts.boundary == "rde") {
            const auto res = rde::solve_rde(opts.lambda, 100000, 400, rng::derive(opts.seed, 0xB0), threads);
            if (!res.converged) throw std::runtime_error("pwit: rde boundary did not converge");
            return pwit::BoundarySampler::from_pools(stats::SampledDistribution(res.pool.x_samples),
                                                     stats::SampledDistribution(res.pool.y_samples));
        }
        const auto sol = ode::solve(opts.lambda);
        if (!sol) throw std::runtime_error("pwit: no ODE solution");
        return pwit::BoundarySampler::from_ode(ode::CdfGrid(sol->trajectory));
    }();

    const pwit::RootStats st = pwit::estimate_root_overlap(opts.lambda, opts.depth, opts.arity,
                                                           opts.trials, boundary, opts.seed, threads);

    std::string csv = "lambda,depth,arity,trials,valid_trials,degenerate,p_root_planted,stderr,boundary\n";
    csv += format_sig12(opts.lambda) + ',' + std::to_string(opts.depth) + ',' +
           std::to_string(opts.arity) + ',' + std::to_string(opts.trials) + ',' +
           std::to_string(st.valid_trials) + ',' + std::to_string(st.degenerate) + ',' +
           format_sig12(st.p_root_planted) + ',' + format_sig12(st.stderr_est) + ',' + opts.boundary +
           '\n';
    write_text_file(opts.out_path, csv);

    std::cout << "pwit: p_root_planted=" << format_sig12(st.p_root_planted) << " +- "
              << format_sig12(st.stderr_est) << " degenerate=" << st.degenerate << "/" << st.trials
              << "\n";

    man.outputs = {opts.out_path};
    man.finished_at = manifest::iso_timestamp_now();
    manifest::write_manifest(man, opts.out_path + ".manifest.json");
    return kOk;
}

int cmd_bound(const BoundOptions& opts) {
    if (!(opts.lambda > 0.0) || opts.n < 1) {
        std::cerr << "bound: need lambda > 0 and n >= 1\n";
        return kParamError;
    }
    double sym_diff = std::nan("");
    double overlap_lb = std::nan("");
    if (opts.lambda >= 4.0) {
        sym_diff = bounds::sym_diff_expectation_bound(opts.lambda, opts.n);
        std::cout << "sym_diff_expectation_bound(lambda=" << format_sig12(opts.lambda)
                  << ", n=" << opts.n << ") = " << format_sig12(sym_diff) << "\n";
    } else {
        overlap_lb = bounds::overlap_lower_bound_small_lambda(opts.lambda);
        std::cout << "overlap_lower_bound(lambda=" << format_sig12(opts.lambda)
                  << ") = " << format_sig12(overlap_lb) << "\n";
    }
    if (!opts.out_path.empty()) {
        manifest::RunManifest man;
        man.command = "bound";
        man.started_at = manifest::iso_timestamp_now();
        man.params = {{"lambda", format_sig12(opts.lambda)}, {"n", std::to_string(opts.n)}};
        std::string csv = "lambda,n,sym_diff_bound,overlap_lower_bound\n";
        csv += format_sig12(opts.lambda) + ',' + std::to_string(opts.n) + ',';
        csv += (std::isnan(sym_diff) ? std::string() : format_sig12(sym_diff)) + ',';
        csv += (std::isnan(overlap_lb) ? std::string() : format_sig12(overlap_lb)) + '\n';
        write_text_file(opts.out_path, csv);
        man.outputs = {opts.out_path};
        man.finished_at = manifest::iso_timestamp_now();
        manifest::write_manifest(man, opts.out_path + ".manifest.json");
    }
    return kOk;
}

}  // namespace pmlab::commands
