#ifndef PMLAB_MODEL_HPP
#define PMLAB_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pmlab::model {

// Finite planted bipartite instance. Side size n, planted rate lambda, and a
// dense row-major n x n weight matrix. By convention the planted matching is
// the identity: entry (i, i) is the planted edge of row i; diagonal weights
// are exponential with mean 1/lambda, off-diagonal with mean n. Regenerating
// from (n, lambda, seed) is bit-identical because each cell is a pure
// function of (seed, cell index).
struct PlantedInstance {
    std::uint32_t n = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> weights;  // row-major, size n * n

    double at(std::uint32_t i, std::uint32_t j) const {
        return weights[static_cast<std::size_t>(i) * n + j];
    }
};

inline constexpr std::uint32_t kMaxSide = 1u << 16;

PlantedInstance generate(std::uint32_t n, double lambda, std::uint64_t seed);

// Text persistence: header line "n,lambda,seed", then n rows of n
// comma-separated weights at 17 significant digits, UTF-8, LF endings.
std::string to_text(const PlantedInstance& inst);
PlantedInstance from_text(const std::string& text);

void save(const PlantedInstance& inst, const std::string& path);
PlantedInstance load(const std::string& path);

}  // namespace pmlab::model

#endif
