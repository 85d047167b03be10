#include "pmlab/model.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pmlab/rng.hpp"

namespace pmlab::model {

PlantedInstance generate(std::uint32_t n, double lambda, std::uint64_t seed) {
    if (n < 1 || n > kMaxSide) throw std::invalid_argument("generate: n out of range");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("generate: lambda must be positive");

    PlantedInstance inst;
    inst.n = n;
    inst.lambda = lambda;
    inst.seed = seed;
    inst.weights.resize(static_cast<std::size_t>(n) * n);

    const double offdiag_rate = 1.0 / static_cast<double>(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(i) * n;
        for (std::uint32_t j = 0; j < n; ++j) {
            const double rate = (i == j) ? lambda : offdiag_rate;
            inst.weights[row + j] = rng::cell_exponential(seed, row + j, rate);
        }
    }
    return inst;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

std::string to_text(const PlantedInstance& inst) {
    std::string out;
    out.reserve(inst.weights.size() * 26 + 64);
    out += std::to_string(inst.n);
    out += ',';
    append_double(out, inst.lambda);
    out += ',';
    out += std::to_string(inst.seed);
    out += '\n';
    for (std::uint32_t i = 0; i < inst.n; ++i) {
        for (std::uint32_t j = 0; j < inst.n; ++j) {
            if (j) out += ',';
            append_double(out, inst.at(i, j));
        }
        out += '\n';
    }
    return out;
}

PlantedInstance from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("instance text: missing header");

    PlantedInstance inst;
    {
        std::istringstream hdr(line);
        std::string field;
        if (!std::getline(hdr, field, ',')) throw std::invalid_argument("instance text: bad header");
        inst.n = static_cast<std::uint32_t>(std::stoul(field));
        if (!std::getline(hdr, field, ',')) throw std::invalid_argument("instance text: bad header");
        inst.lambda = std::strtod(field.c_str(), nullptr);
        if (!std::getline(hdr, field, ',')) throw std::invalid_argument("instance text: bad header");
        inst.seed = std::stoull(field);
    }
    if (inst.n < 1 || inst.n > kMaxSide) throw std::invalid_argument("instance text: n out of range");

    inst.weights.reserve(static_cast<std::size_t>(inst.n) * inst.n);
    for (std::uint32_t i = 0; i < inst.n; ++i) {
        if (!std::getline(in, line)) throw std::invalid_argument("instance text: missing row");
        const char* p = line.c_str();
        for (std::uint32_t j = 0; j < inst.n; ++j) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p) throw std::invalid_argument("instance text: bad weight");
            inst.weights.push_back(v);
            p = (*end == ',') ? end + 1 : end;
        }
    }
    if (inst.weights.size() != static_cast<std::size_t>(inst.n) * inst.n)
        throw std::invalid_argument("instance text: wrong cell count");
    return inst;
}

void save(const PlantedInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    const std::string text = to_text(inst);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

PlantedInstance load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

}  // namespace pmlab::model
