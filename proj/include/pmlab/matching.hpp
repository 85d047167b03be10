#ifndef PMLAB_MATCHING_HPP
#define PMLAB_MATCHING_HPP

#include <cstdint>
#include <vector>

#include "pmlab/model.hpp"

namespace pmlab::matching {

// One alternating cycle of the symmetric difference M* triangle M_min.
// vertices alternates left index, right index, left, right, ... and has even
// length 2t; edge (vertices[2k], vertices[2k+1]) is the minimum-matching edge
// and (vertices[2k+2 mod], vertices[2k+1]) the planted one.
struct AlternatingCycle {
    std::vector<std::uint32_t> vertices;
    double planted_weight = 0.0;
    double unplanted_weight = 0.0;

    std::size_t length() const { return vertices.size(); }
};

struct MatchingResult {
    std::vector<std::uint32_t> assignment;  // row i matched to column assignment[i]
    double weight = 0.0;                    // compensated sum of selected entries
    std::uint32_t overlap_count = 0;        // fixed points of the assignment
    std::vector<AlternatingCycle> cycles;   // filled by decompose_symmetric_difference
    std::vector<double> row_potentials;     // duals (u, v) for the optimality certificate
    std::vector<double> col_potentials;
};

// Exact minimum-weight perfect matching by shortest augmenting paths with
// dual potentials (Jonker-Volgenant style), O(n^3) on the dense matrix.
MatchingResult solve_min_matching(const model::PlantedInstance& instance);

// Exhaustive minimum over all n! permutations, n <= 10; ties broken by the
// lexicographically smallest permutation. Test oracle.
MatchingResult brute_force_min_matching(const model::PlantedInstance& instance);

double overlap(const MatchingResult& result, std::uint32_t n);

// Partition M* triangle M_min into alternating cycles by following the
// assignment permutation; each cycle of a minimal matching is augmenting
// (planted weight exceeds un-planted weight).
std::vector<AlternatingCycle> decompose_symmetric_difference(const model::PlantedInstance& instance,
                                                             const MatchingResult& result);

// Dual feasibility (u_i + v_j <= w_ij) and complementary slackness on matched
// edges, within tol * max(1, |w_ij|).
bool check_optimality_certificate(const model::PlantedInstance& instance,
                                  const MatchingResult& result, double tol = 1e-8);

double recompute_weight(const model::PlantedInstance& instance,
                        const std::vector<std::uint32_t>& assignment);

}  // namespace pmlab::matching

#endif
