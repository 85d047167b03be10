#include "pmlab/pwit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "pmlab/parallel.hpp"

namespace pmlab::pwit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Key derivation shared by the materialized builder and the lazy evaluator;
// both must produce bit-identical draws for the same vertex.
std::uint64_t root_key(std::uint64_t trial_key) { return rng::derive(trial_key, 7); }
std::uint64_t child_key(std::uint64_t key, std::uint32_t slot) { return rng::derive(key, 16 + slot); }

double planted_weight_of(std::uint64_t key, double lambda) {
    rng::Stream s(rng::derive(key, 1));
    return s.next_exponential(lambda);
}

double boundary_draw(std::uint64_t key, std::uint64_t salt, bool parent_planted,
                     const BoundarySampler& b) {
    rng::Stream s(rng::derive(rng::derive(key, 3), salt));
    const double u = s.next_open();
    return parent_planted ? b.quantile_x(u) : b.quantile_y(u);
}

}  // namespace

BoundarySampler BoundarySampler::from_ode(const ode::CdfGrid& grid) {
    BoundarySampler b;
    b.grid_ = std::make_shared<ode::CdfGrid>(grid);
    const std::size_t n = 4096;
    auto build = [&](Table& t, bool is_x) {
        t.u_lo = 1.0 / 1024.0;
        t.u_hi = 1.0 - 1.0 / 1024.0;
        t.q.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            const double u = t.u_lo + (t.u_hi - t.u_lo) * static_cast<double>(i) / static_cast<double>(n);
            t.q[i] = is_x ? b.grid_->quantile_x(u) : b.grid_->quantile_y(u);
        }
        t.du_inv = static_cast<double>(n) / (t.u_hi - t.u_lo);
    };
    build(b.tx_, true);
    build(b.ty_, false);
    return b;
}

BoundarySampler BoundarySampler::from_pools(stats::SampledDistribution x_pool,
                                            stats::SampledDistribution y_pool) {
    BoundarySampler b;
    b.px_ = std::make_shared<stats::SampledDistribution>(std::move(x_pool));
    b.py_ = std::make_shared<stats::SampledDistribution>(std::move(y_pool));
    return b;
}

double BoundarySampler::quantile_x(double u) const {
    if (px_) return px_->quantile(u);
    if (u >= tx_.u_lo && u <= tx_.u_hi) {
        const double pos = (u - tx_.u_lo) * tx_.du_inv;
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 < tx_.q.size()) {
            const double frac = pos - static_cast<double>(i);
            return tx_.q[i] + frac * (tx_.q[i + 1] - tx_.q[i]);
        }
    }
    return grid_->quantile_x(u);
}

double BoundarySampler::quantile_y(double u) const {
    if (py_) return py_->quantile(u);
    if (u >= ty_.u_lo && u <= ty_.u_hi) {
        const double pos = (u - ty_.u_lo) * ty_.du_inv;
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 < ty_.q.size()) {
            const double frac = pos - static_cast<double>(i);
            return ty_.q[i] + frac * (ty_.q[i + 1] - ty_.q[i]);
        }
    }
    return grid_->quantile_y(u);
}

std::size_t node_count(std::uint32_t depth, std::uint32_t arity) {
    // a_k: vertices at depth k that own a planted child; b_k: those that do
    // not (their parent edge is planted).
    long double a = 1.0L, b = 0.0L, total = 1.0L;
    for (std::uint32_t k = 1; k <= depth; ++k) {
        const long double a_next = static_cast<long double>(arity) * (a + b);
        const long double b_next = a;
        a = a_next;
        b = b_next;
        total += a + b;
        if (total > 1e18L) return static_cast<std::size_t>(-1);
    }
    total += a;  // depth H+1: planted partners of eligible depth-H vertices
    return static_cast<std::size_t>(total);
}

PwitTree build_tree(double lambda, std::uint32_t depth, std::uint32_t arity, std::uint64_t key,
                    std::size_t node_cap) {
    if (depth < 1) throw std::invalid_argument("build_tree: depth must be >= 1");
    if (arity < 1 || arity > kMaxArity) throw std::invalid_argument("build_tree: arity out of range");
    if (!(lambda > 0.0)) throw std::invalid_argument("build_tree: lambda must be positive");
    const std::size_t expected = node_count(depth, arity);
    if (expected > node_cap) throw std::length_error("build_tree: node count exceeds cap");

    PwitTree tree;
    tree.lambda = lambda;
    tree.depth = depth;
    tree.arity = arity;
    tree.nodes.reserve(expected);
    tree.level_begin.assign(depth + 3, 0);

    PwitTree::Node root;
    root.key = root_key(key);
    root.level = 0;
    root.parent = 0;
    root.parent_weight = std::numeric_limits<double>::quiet_NaN();
    tree.nodes.push_back(root);
    tree.level_begin[0] = 0;
    tree.level_begin[1] = 1;

    for (std::uint32_t level = 0; level <= depth; ++level) {
        const std::size_t begin = tree.level_begin[level];
        const std::size_t end = tree.level_begin[level + 1];
        for (std::size_t vi = begin; vi < end; ++vi) {
            const bool has_planted = !tree.nodes[vi].parent_planted;  // root included
            const std::uint64_t vkey = tree.nodes[vi].key;
            tree.nodes[vi].first_child = static_cast<std::uint32_t>(tree.nodes.size());
            std::uint16_t n_children = 0;

            if (has_planted) {
                PwitTree::Node c;
                c.parent = static_cast<std::uint32_t>(vi);
                c.level = static_cast<std::uint8_t>(level + 1);
                c.parent_planted = true;
                c.parent_weight = planted_weight_of(vkey, lambda);
                c.key = child_key(vkey, 0);
                tree.nodes.push_back(c);
                ++n_children;
            }
            if (level < depth) {
                rng::Stream gaps(rng::derive(vkey, 2));
                double z = 0.0;
                for (std::uint32_t j = 1; j <= arity; ++j) {
                    z += gaps.next_exponential(1.0);
                    PwitTree::Node c;
                    c.parent = static_cast<std::uint32_t>(vi);
                    c.level = static_cast<std::uint8_t>(level + 1);
                    c.parent_planted = false;
                    c.parent_weight = z;
                    c.key = child_key(vkey, j);
                    tree.nodes.push_back(c);
                    ++n_children;
                }
            }
            tree.nodes[vi].n_children = n_children;
        }
        tree.level_begin[level + 2] = tree.nodes.size();
    }
    return tree;
}

void propagate_messages(PwitTree& tree, const BoundarySampler& boundary, std::uint64_t salt) {
    const std::uint32_t H = tree.depth;
    auto& nodes = tree.nodes;

    // Seed the downward edges into depth-H vertices.
    for (std::size_t vi = tree.level_begin[H]; vi < tree.level_begin[H + 1]; ++vi) {
        nodes[vi].down_msg = boundary_draw(nodes[vi].key, salt, nodes[vi].parent_planted, boundary);
        nodes[vi].down_set = true;
    }

    // Upward sweep: levels H-1 .. 1.
    for (std::uint32_t level = H >= 1 ? H - 1 : 0; level >= 1; --level) {
        for (std::size_t vi = tree.level_begin[level]; vi < tree.level_begin[level + 1]; ++vi) {
            auto& v = nodes[vi];
            double m = kInf;
            for (std::uint32_t c = 0; c < v.n_children; ++c) {
                const auto& ch = nodes[v.first_child + c];
                m = std::min(m, ch.parent_weight - ch.down_msg);
            }
            v.down_msg = m;
            v.down_set = true;
        }
    }

    // Downward sweep: assign up_msg of every child, levels 1 .. H+1.
    for (std::uint32_t level = 0; level <= H; ++level) {
        for (std::size_t vi = tree.level_begin[level]; vi < tree.level_begin[level + 1]; ++vi) {
            const auto& v = nodes[vi];
            if (v.n_children == 0) continue;
            // Two smallest candidates among parent edge and child edges.
            double m1 = kInf, m2 = kInf;
            std::int64_t arg1 = -2;  // -1 = parent candidate, >=0 child offset
            if (level > 0) {
                const double cand = v.parent_weight - v.up_msg;
                m1 = cand;
                arg1 = -1;
            }
            for (std::uint32_t c = 0; c < v.n_children; ++c) {
                const auto& ch = nodes[v.first_child + c];
                if (!ch.down_set) continue;
                const double cand = ch.parent_weight - ch.down_msg;
                if (cand < m1) {
                    m2 = m1;
                    m1 = cand;
                    arg1 = c;
                } else if (cand < m2) {
                    m2 = cand;
                }
            }
            for (std::uint32_t c = 0; c < v.n_children; ++c) {
                auto& ch = nodes[v.first_child + c];
                const double excl = (arg1 == static_cast<std::int64_t>(c)) ? m2 : m1;
                ch.up_msg = excl;
                ch.up_set = std::isfinite(excl);
            }
        }
    }
    tree.propagated = true;
}

int extract_matching(PwitTree& tree) {
    if (!tree.propagated) throw std::logic_error("extract_matching: messages not propagated");
    auto& nodes = tree.nodes;
    for (std::size_t vi = 1; vi < nodes.size(); ++vi) {
        auto& v = nodes[vi];
        v.marked = v.down_set && v.up_set && (v.parent_weight < v.down_msg + v.up_msg);
    }
    int root_marked = 0;
    const auto& root = nodes[0];
    for (std::uint32_t c = 0; c < root.n_children; ++c)
        if (nodes[root.first_child + c].marked) ++root_marked;
    return root_marked;
}

AuditResult audit_tree(const PwitTree& tree) {
    AuditResult res;
    if (!tree.propagated) throw std::logic_error("audit_tree: messages not propagated");
    const auto& nodes = tree.nodes;
    const std::uint32_t H = tree.depth;

    auto near_ulp = [](double a, double b) {
        if (a == b) return true;
        return std::nextafter(a, b) == b;
    };

    // Recompute every computed downward message from its children.
    for (std::uint32_t level = 1; level < H; ++level) {
        for (std::size_t vi = tree.level_begin[level]; vi < tree.level_begin[level + 1]; ++vi) {
            const auto& v = nodes[vi];
            double m = kInf;
            for (std::uint32_t c = 0; c < v.n_children; ++c) {
                const auto& ch = nodes[v.first_child + c];
                m = std::min(m, ch.parent_weight - ch.down_msg);
            }
            ++res.checked_edges;
            if (!near_ulp(m, v.down_msg)) res.baleq_exact = false;
        }
    }
    // Recompute every upward message from the parent's other neighbors.
    for (std::size_t vi = 1; vi < nodes.size(); ++vi) {
        const auto& v = nodes[vi];
        if (!v.up_set) continue;
        const auto& p = nodes[v.parent];
        double m = kInf;
        if (p.level > 0) m = std::min(m, p.parent_weight - p.up_msg);
        for (std::uint32_t c = 0; c < p.n_children; ++c) {
            const auto& sib = nodes[p.first_child + c];
            if (&sib == &v || !sib.down_set) continue;
            m = std::min(m, sib.parent_weight - sib.down_msg);
        }
        ++res.checked_edges;
        if (!near_ulp(m, v.up_msg)) res.baleq_exact = false;
    }

    // Matching consistency on vertices whose full neighborhood is in the
    // tree: the argmin partner must carry the unique incident mark.
    for (std::uint32_t level = 0; level < H; ++level) {
        for (std::size_t vi = tree.level_begin[level]; vi < tree.level_begin[level + 1]; ++vi) {
            const auto& v = nodes[vi];
            double best = kInf;
            int best_slot = -2;  // -1 parent, >=0 child offset
            bool best_marked = false;
            int marked_count = 0;
            if (level > 0) {
                best = v.parent_weight - v.up_msg;
                best_slot = -1;
                best_marked = v.marked;
                if (v.marked) ++marked_count;
            }
            for (std::uint32_t c = 0; c < v.n_children; ++c) {
                const auto& ch = nodes[v.first_child + c];
                if (!ch.down_set) continue;
                const double cand = ch.parent_weight - ch.down_msg;
                if (ch.marked) ++marked_count;
                if (cand < best) {
                    best = cand;
                    best_slot = static_cast<int>(c);
                    best_marked = ch.marked;
                }
            }
            ++res.checked_vertices;
            if (marked_count != 1 || !best_marked) res.matching_consistent = false;
            (void)best_slot;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Lazy exact evaluation of root messages.

namespace {

struct LazyEvaluator {
    double lambda;
    std::uint32_t depth;
    std::uint32_t arity;
    const BoundarySampler* boundary;
    std::uint64_t salt;

    // Exact X(parent -> v) for the vertex with this key.
    double down(std::uint64_t key, std::uint32_t level, bool parent_planted) const {
        if (level == depth) return boundary_draw(key, salt, parent_planted, *boundary);

        double w[kMaxArity + 1];
        std::uint32_t slot[kMaxArity + 1];
        int m = 0;
        double wp = kInf;
        if (!parent_planted) wp = planted_weight_of(key, lambda);
        {
            rng::Stream gaps(rng::derive(key, 2));
            double z = 0.0;
            bool inserted = parent_planted;
            for (std::uint32_t j = 1; j <= arity; ++j) {
                z += gaps.next_exponential(1.0);
                if (!inserted && wp < z) {
                    w[m] = wp;
                    slot[m] = 0;
                    ++m;
                    inserted = true;
                }
                w[m] = z;
                slot[m] = j;
                ++m;
            }
            if (!inserted) {
                w[m] = wp;
                slot[m] = 0;
                ++m;
            }
        }

        double cur = kInf;
        for (int i = 0; i < m; ++i) {
            const std::uint64_t ck = child_key(key, slot[i]);
            const bool cp = slot[i] == 0;
            if (cur < kInf) {
                // A certified bound: the child's message is at most the value
                // of its own cheapest-edge candidate, so this branch cannot
                // improve the running min if w - ub >= cur.
                const double ub = down_upper_bound(ck, level + 1, cp);
                if (w[i] - ub >= cur) continue;
            }
            const double cand = w[i] - down(ck, level + 1, cp);
            if (cand < cur) cur = cand;
        }
        return cur;
    }

    // Upper bound on X(parent -> v): one candidate of the min, with the
    // grandchild branch evaluated exactly.
    double down_upper_bound(std::uint64_t key, std::uint32_t level, bool parent_planted) const {
        if (level == depth) return boundary_draw(key, salt, parent_planted, *boundary);
        double w1;
        std::uint32_t slot1;
        if (!parent_planted) {
            const double wp = planted_weight_of(key, lambda);
            rng::Stream gaps(rng::derive(key, 2));
            const double z1 = gaps.next_exponential(1.0);
            if (wp < z1) {
                w1 = wp;
                slot1 = 0;
            } else {
                w1 = z1;
                slot1 = 1;
            }
        } else {
            rng::Stream gaps(rng::derive(key, 2));
            w1 = gaps.next_exponential(1.0);
            slot1 = 1;
        }
        return w1 - down(child_key(key, slot1), level + 1, slot1 == 0);
    }
};

}  // namespace

RootSample eval_root(double lambda, std::uint32_t depth, std::uint32_t arity,
                     const BoundarySampler& boundary, std::uint64_t trial_key, std::uint64_t salt) {
    if (depth < 1 || arity < 1 || arity > kMaxArity)
        throw std::invalid_argument("eval_root: bad depth or arity");

    LazyEvaluator ev{lambda, depth, arity, &boundary, salt};
    const std::uint64_t rk = root_key(trial_key);

    RootSample out;
    out.ell_planted = planted_weight_of(rk, lambda);
    out.down_planted = ev.down(child_key(rk, 0), 1, true);
    const double c_planted = out.ell_planted - out.down_planted;

    // Exact min over the un-planted root edges, with the two smallest
    // evaluated candidates kept for tie detection.
    rng::Stream gaps(rng::derive(rk, 2));
    double u1 = kInf, u2 = kInf;
    double z = 0.0;
    for (std::uint32_t j = 1; j <= arity; ++j) {
        z += gaps.next_exponential(1.0);
        const std::uint64_t ck = child_key(rk, j);
        if (u1 < kInf) {
            const double ub = ev.down_upper_bound(ck, 1, false);
            if (z - ub >= u1) continue;
        }
        const double cand = z - ev.down(ck, 1, false);
        if (cand < u1) {
            u2 = u1;
            u1 = cand;
        } else if (cand < u2) {
            u2 = cand;
        }
    }
    out.up_planted = u1;

    const bool any_nan = std::isnan(c_planted) || std::isnan(u1);
    const bool tie = c_planted == u1 || u1 == u2;
    if (any_nan || tie) {
        out.marked_root_edges = 0;  // no strict argmin: degenerate
        out.planted_marked = false;
    } else {
        out.marked_root_edges = 1;
        out.planted_marked = c_planted < u1;
    }
    return out;
}

RootStats estimate_root_overlap(double lambda, std::uint32_t depth, std::uint32_t arity,
                                std::uint64_t trials, const BoundarySampler& boundary,
                                std::uint64_t seed, unsigned threads) {
    if (trials == 0) throw std::invalid_argument("estimate_root_overlap: trials must be positive");
    std::vector<RootSample> samples(trials);
    const std::uint64_t base = rng::derive(seed, 0xF00D);
    parallel_for(0, trials, threads, [&](std::size_t t) {
        samples[t] = eval_root(lambda, depth, arity, boundary, rng::derive(base, t));
    });

    RootStats st;
    st.trials = trials;
    std::vector<double> ells, downs;
    ells.reserve(trials);
    downs.reserve(trials);
    std::uint64_t hits = 0;
    for (const auto& s : samples) {
        if (s.marked_root_edges != 1) {
            ++st.degenerate;
            continue;
        }
        ++st.valid_trials;
        if (s.planted_marked) ++hits;
        ells.push_back(s.ell_planted);
        downs.push_back(s.down_planted);
    }
    if (st.valid_trials > 0) {
        st.p_root_planted = static_cast<double>(hits) / static_cast<double>(st.valid_trials);
        st.stderr_est = std::sqrt(st.p_root_planted * (1.0 - st.p_root_planted) /
                                  static_cast<double>(st.valid_trials));
    }
    if (ells.size() > 2) st.weight_message_corr = stats::correlation(ells, downs);
    return st;
}

}  // namespace pmlab::pwit
