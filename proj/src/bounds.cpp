#include "pmlab/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace pmlab::bounds {

double erlang_exceed_bound(const ErlangBoundQuery& q) {
    if (q.t < 1) throw std::invalid_argument("erlang_exceed_bound: t must be >= 1");
    if (!(q.lambda1 > q.lambda2) || !(q.lambda2 > 0.0))
        throw std::invalid_argument("erlang_exceed_bound: need lambda1 > lambda2 > 0");
    const double s = q.lambda1 + q.lambda2;
    const double base = 4.0 * q.lambda1 * q.lambda2 / (s * s);
    return std::pow(base, static_cast<double>(q.t));
}

double sym_diff_expectation_bound(double lambda, std::uint32_t n) {
    if (!(lambda >= 4.0)) throw std::invalid_argument("sym_diff_expectation_bound: lambda must be >= 4");
    if (n < 1) throw std::invalid_argument("sym_diff_expectation_bound: n must be >= 1");
    const double ratio = 4.0 / lambda;
    const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
    double sum = 0.0;
    for (std::uint32_t t = 1; t <= n; ++t) {
        const double td = static_cast<double>(t);
        const double term = std::pow(ratio, td) * std::exp(-td * td * inv2n);
        sum += term;
        if (term < 1e-16) break;
    }
    return 2.0 * std::exp(0.5) * sum;
}

double overlap_lower_bound_small_lambda(double lambda) {
    if (!(lambda > 0.0) || lambda > 4.0)
        throw std::invalid_argument("overlap_lower_bound_small_lambda: lambda must lie in (0, 4]");
    const double v = 1.0 - 2.0 * std::log(4.0 / lambda);
    return v > 0.0 ? v : 0.0;
}

}  // namespace pmlab::bounds
