#ifndef PMLAB_BOUNDS_HPP
#define PMLAB_BOUNDS_HPP

#include <cstdint>

namespace pmlab::bounds {

struct ErlangBoundQuery {
    std::uint32_t t = 1;   // number of summands per side
    double lambda1 = 0.0;  // faster rate
    double lambda2 = 0.0;  // slower rate, lambda1 > lambda2 > 0
};

// Chernoff-style bound on P[X1 > X2] for X1 ~ Erlang(t, lambda1),
// X2 ~ Erlang(t, lambda2): (4 l1 l2 / (l1 + l2)^2)^t.
double erlang_exceed_bound(const ErlangBoundQuery& q);

// First-moment bound on E|M* triangle M_min| in the recovered regime:
// 2 e^{1/2} sum_{t=1}^{n} (4/lambda)^t e^{-t^2/(2n)}, summed with early
// termination once terms drop below 1e-16.
double sym_diff_expectation_bound(double lambda, std::uint32_t n);

// Advisory lower bound on the overlap for lambda < 4: max(0, 1 - 2 ln(4/lambda)).
double overlap_lower_bound_small_lambda(double lambda);

}  // namespace pmlab::bounds

#endif
