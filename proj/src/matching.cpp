#include "pmlab/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pmlab::matching {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kahan-compensated sum of the entries selected by the assignment.
double kahan_weight(const model::PlantedInstance& inst, const std::vector<std::uint32_t>& a) {
    double sum = 0.0, c = 0.0;
    for (std::uint32_t i = 0; i < inst.n; ++i) {
        const double y = inst.at(i, a[i]) - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

std::uint32_t count_fixed_points(const std::vector<std::uint32_t>& a) {
    std::uint32_t k = 0;
    for (std::uint32_t i = 0; i < a.size(); ++i)
        if (a[i] == i) ++k;
    return k;
}

// Dijkstra scan for the shortest augmenting path rooted at start_row.
// Returns the sink column; updates path[], shortest[], scanned flags.
std::uint32_t augmenting_path(std::uint32_t n, const double* cost, const std::vector<double>& u,
                              const std::vector<double>& v, const std::vector<std::int64_t>& row4col,
                              std::uint32_t start_row, std::vector<std::int64_t>& path,
                              std::vector<double>& shortest, std::vector<char>& scanned_rows,
                              std::vector<char>& scanned_cols, std::vector<std::uint32_t>& remaining,
                              double& min_val_out) {
    std::fill(shortest.begin(), shortest.end(), kInf);
    std::fill(scanned_rows.begin(), scanned_rows.end(), 0);
    std::fill(scanned_cols.begin(), scanned_cols.end(), 0);
    std::iota(remaining.begin(), remaining.end(), 0u);

    std::size_t num_remaining = n;
    double min_val = 0.0;
    std::uint32_t i = start_row;
    std::int64_t sink = -1;

    while (sink == -1) {
        scanned_rows[i] = 1;
        const double* row = cost + static_cast<std::size_t>(i) * n;
        const double ui = u[i];
        std::size_t index = 0;
        double lowest = kInf;
        for (std::size_t it = 0; it < num_remaining; ++it) {
            const std::uint32_t j = remaining[it];
            const double r = min_val + row[j] - ui - v[j];
            if (r < shortest[j]) {
                path[j] = i;
                shortest[j] = r;
            }
            if (shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == -1)) {
                lowest = shortest[j];
                index = it;
            }
        }
        min_val = lowest;
        if (!(min_val < kInf)) throw std::runtime_error("solve_min_matching: infeasible matrix");
        const std::uint32_t j = remaining[index];
        if (row4col[j] == -1)
            sink = j;
        else
            i = static_cast<std::uint32_t>(row4col[j]);
        scanned_cols[j] = 1;
        remaining[index] = remaining[--num_remaining];
    }
    min_val_out = min_val;
    return static_cast<std::uint32_t>(sink);
}

}  // namespace

MatchingResult solve_min_matching(const model::PlantedInstance& inst) {
    const std::uint32_t n = inst.n;
    if (n == 0 || inst.weights.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("solve_min_matching: invalid instance");

    std::vector<double> u(n, 0.0), v(n, 0.0), shortest(n);
    std::vector<std::int64_t> path(n, -1), col4row(n, -1), row4col(n, -1);
    std::vector<char> sr(n), sc(n);
    std::vector<std::uint32_t> remaining(n);
    const double* cost = inst.weights.data();

    for (std::uint32_t cur_row = 0; cur_row < n; ++cur_row) {
        double min_val = 0.0;
        std::uint32_t sink =
            augmenting_path(n, cost, u, v, row4col, cur_row, path, shortest, sr, sc, remaining, min_val);

        u[cur_row] += min_val;
        for (std::uint32_t ip = 0; ip < n; ++ip)
            if (sr[ip] && ip != cur_row) u[ip] += min_val - shortest[col4row[ip]];
        for (std::uint32_t jp = 0; jp < n; ++jp)
            if (sc[jp]) v[jp] -= min_val - shortest[jp];

        // Augment backward along the alternating tree.
        std::int64_t j = sink;
        while (true) {
            const std::int64_t ip = path[j];
            row4col[j] = ip;
            std::swap(col4row[ip], j);
            if (ip == cur_row) break;
        }
    }

    MatchingResult res;
    res.assignment.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) res.assignment[i] = static_cast<std::uint32_t>(col4row[i]);
    res.weight = kahan_weight(inst, res.assignment);
    res.overlap_count = count_fixed_points(res.assignment);
    res.row_potentials = std::move(u);
    res.col_potentials = std::move(v);
    return res;
}

MatchingResult brute_force_min_matching(const model::PlantedInstance& inst) {
    const std::uint32_t n = inst.n;
    if (n > 10) throw std::invalid_argument("brute_force_min_matching: n too large");
    if (n == 0) throw std::invalid_argument("brute_force_min_matching: empty instance");

    std::vector<std::uint32_t> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0u);
    best = perm;
    double best_w = kahan_weight(inst, perm);
    // next_permutation enumerates in lexicographic order starting from the
    // identity, so keeping only strict improvements breaks ties toward the
    // lexicographically smallest permutation.
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double w = kahan_weight(inst, perm);
        if (w < best_w) {
            best_w = w;
            best = perm;
        }
    }

    MatchingResult res;
    res.assignment = std::move(best);
    res.weight = best_w;
    res.overlap_count = count_fixed_points(res.assignment);
    return res;
}

double overlap(const MatchingResult& result, std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("overlap: n must be positive");
    return static_cast<double>(result.overlap_count) / static_cast<double>(n);
}

std::vector<AlternatingCycle> decompose_symmetric_difference(const model::PlantedInstance& inst,
                                                             const MatchingResult& result) {
    const std::uint32_t n = inst.n;
    const auto& a = result.assignment;
    std::vector<char> seen(n, 0);
    std::vector<AlternatingCycle> cycles;

    for (std::uint32_t start = 0; start < n; ++start) {
        if (seen[start] || a[start] == start) continue;
        AlternatingCycle cyc;
        std::uint32_t i = start;
        do {
            seen[i] = 1;
            cyc.vertices.push_back(i);        // left vertex i
            cyc.vertices.push_back(a[i]);     // right vertex a[i]'
            cyc.unplanted_weight += inst.at(i, a[i]);
            cyc.planted_weight += inst.at(i, i);
            i = a[i];                         // planted edge (a[i], a[i]') continues the cycle
        } while (i != start);
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

bool check_optimality_certificate(const model::PlantedInstance& inst, const MatchingResult& result,
                                  double tol) {
    const std::uint32_t n = inst.n;
    if (result.row_potentials.size() != n || result.col_potentials.size() != n) return false;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            const double w = inst.at(i, j);
            const double slack = w - result.row_potentials[i] - result.col_potentials[j];
            const double allow = tol * std::max(1.0, std::abs(w));
            if (slack < -allow) return false;
            if (j == result.assignment[i] && std::abs(slack) > allow) return false;
        }
    }
    return true;
}

double recompute_weight(const model::PlantedInstance& inst, const std::vector<std::uint32_t>& a) {
    return kahan_weight(inst, a);
}

}  // namespace pmlab::matching
