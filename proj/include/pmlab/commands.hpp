#ifndef PMLAB_COMMANDS_HPP
#define PMLAB_COMMANDS_HPP

#include <cstdint>
#include <string>

namespace pmlab::commands {

// Exit codes shared by the CLI: 0 success, 2 parameter error, 3 the
// lambda >= 4 no-solution regime, 4 convergence failure.
inline constexpr int kOk = 0;
inline constexpr int kParamError = 2;
inline constexpr int kNoSolution = 3;
inline constexpr int kConvergenceError = 4;

struct AlphaOptions {
    double lambda_min = 0.5;
    double lambda_max = 3.5;
    std::uint32_t steps = 7;
    std::string out_path;
    std::uint32_t mc_n = 0;       // 0 disables the Monte Carlo columns
    std::uint32_t mc_trials = 0;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = hardware default
};

struct SimulateOptions {
    std::uint32_t n = 1000;
    double lambda = 1.0;
    std::uint32_t trials = 10;
    std::uint64_t seed = 1;
    std::string out_path;
    unsigned threads = 0;
};

struct RdeOptions {
    double lambda = 1.0;
    std::size_t pool = 100000;
    std::uint32_t iters = 300;
    std::uint64_t seed = 1;
    std::string out_path;
    unsigned threads = 0;
};

struct PwitOptions {
    double lambda = 1.0;
    std::uint32_t depth = 8;
    std::uint32_t arity = 12;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string boundary = "ode";  // "ode" or "rde"
    unsigned threads = 0;
};

struct BoundOptions {
    double lambda = 4.0;
    std::uint32_t n = 1000;
    std::string out_path;  // optional
};

int cmd_alpha(const AlphaOptions& opts);
int cmd_simulate(const SimulateOptions& opts);
int cmd_rde(const RdeOptions& opts);
int cmd_pwit(const PwitOptions& opts);
int cmd_bound(const BoundOptions& opts);

std::string format_sig12(double v);

}  // namespace pmlab::commands

#endif
