#ifndef PMLAB_MANIFEST_HPP
#define PMLAB_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pmlab::manifest {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> params;  // stringified parameters
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;  // file paths; checksums computed on write
};

// Writes `<out_path>` as a JSON object {command, params, seed, version,
// started_at, finished_at, outputs: [{path, sha256}]}.
void write_manifest(const RunManifest& m, const std::string& out_path);

std::string iso_timestamp_now();

}  // namespace pmlab::manifest

#endif
