#ifndef PMLAB_PWIT_HPP
#define PMLAB_PWIT_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "pmlab/ode.hpp"
#include "pmlab/rng.hpp"
#include "pmlab/stats.hpp"

namespace pmlab::pwit {

// Quantile source for the boundary messages: X0 draws on planted boundary
// edges, Y0 on un-planted ones. Built either from the ODE CDFs (with a
// tabulated inverse for the hot path) or from RDE sample pools.
class BoundarySampler {
  public:
    static BoundarySampler from_ode(const ode::CdfGrid& grid);
    static BoundarySampler from_pools(stats::SampledDistribution x_pool,
                                      stats::SampledDistribution y_pool);

    double quantile_x(double u) const;
    double quantile_y(double u) const;

  private:
    struct Table {
        double u_lo = 0.0;
        double u_hi = 1.0;
        double du_inv = 0.0;
        std::vector<double> q;
    };
    Table tx_, ty_;
    std::shared_ptr<const ode::CdfGrid> grid_;
    std::shared_ptr<const stats::SampledDistribution> px_, py_;
};

// Truncated planted PWIT, materialized level by level. Vertices at depth
// below H carry one planted child (unless their parent edge is planted) and
// `arity` un-planted children; depth-H vertices keep only their planted
// partner at depth H+1. Messages live on directed edges: down_msg is
// X(parent -> v), up_msg is X(v -> parent).
struct PwitTree {
    struct Node {
        std::uint32_t parent = 0;
        std::uint32_t first_child = 0;
        std::uint16_t n_children = 0;
        std::uint8_t level = 0;
        bool parent_planted = false;
        double parent_weight = 0.0;
        std::uint64_t key = 0;  // RNG key of the vertex
        double down_msg = 0.0;
        double up_msg = 0.0;
        bool down_set = false;
        bool up_set = false;
        bool marked = false;
    };

    double lambda = 0.0;
    std::uint32_t depth = 0;  // H
    std::uint32_t arity = 0;  // B
    std::vector<Node> nodes;
    std::vector<std::size_t> level_begin;  // level k spans [level_begin[k], level_begin[k+1])
    bool propagated = false;
};

inline constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 24;
inline constexpr std::uint32_t kMaxArity = 64;

// Expected node count of the truncated tree, for the overflow guard.
std::size_t node_count(std::uint32_t depth, std::uint32_t arity);

PwitTree build_tree(double lambda, std::uint32_t depth, std::uint32_t arity, std::uint64_t key,
                    std::size_t node_cap = kDefaultNodeCap);

// Seed the downward edges into depth-H vertices from the boundary
// distributions, sweep up to the root, then sweep back down. Every interior
// directed edge satisfies the min recursion exactly afterwards.
void propagate_messages(PwitTree& tree, const BoundarySampler& boundary, std::uint64_t salt = 0);

// Mark edges whose weight is below the sum of their two directed messages.
// Returns the number of marked edges incident to the root.
int extract_matching(PwitTree& tree);

struct AuditResult {
    bool baleq_exact = true;        // min recursion holds to 1 ulp on interior edges
    bool matching_consistent = true;  // argmin and indicator rules agree on full vertices
    std::size_t checked_edges = 0;
    std::size_t checked_vertices = 0;
};

AuditResult audit_tree(const PwitTree& tree);

struct RootStats {
    double p_root_planted = 0.0;
    double stderr_est = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t valid_trials = 0;
    std::uint64_t degenerate = 0;
    double weight_message_corr = 0.0;  // corr(root planted weight, its down message)
};

// Per-trial root evaluation without materializing the tree: the recursive
// min evaluation skips subtrees only when a certified bound proves they
// cannot affect any root message, so results are bit-identical to a full
// build-and-sweep with the same keys.
struct RootSample {
    double ell_planted = 0.0;   // weight of the root planted edge
    double down_planted = 0.0;  // X(root -> 0)
    double up_planted = 0.0;    // X(0 -> root), min over the un-planted root edges
    int marked_root_edges = 0;
    bool planted_marked = false;
};

RootSample eval_root(double lambda, std::uint32_t depth, std::uint32_t arity,
                     const BoundarySampler& boundary, std::uint64_t trial_key,
                     std::uint64_t salt = 0);

RootStats estimate_root_overlap(double lambda, std::uint32_t depth, std::uint32_t arity,
                                std::uint64_t trials, const BoundarySampler& boundary,
                                std::uint64_t seed, unsigned threads = 1);

}  // namespace pmlab::pwit

#endif
