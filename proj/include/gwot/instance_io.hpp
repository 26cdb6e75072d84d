#pragma once

#include "gwot/graph_align.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>

namespace gwot {

// Binary instance container, all numbers little-endian:
//
//   "GWAI1"                    5-byte magic
//   u64 n
//   f64 p_edge, f64 eta, u64 seed        (metadata block)
//   f64[n*n] adjacency_1, adjacency_2     row-major, entries 0.0 / 1.0
//   f64[n*n] c1, c2                       row-major
//   u64[n]   perm_true
//
// The marginals are uniform and are not stored.

inline constexpr char kInstanceMagic[] = "GWAI1";
inline constexpr std::uintmax_t kInstanceHeaderBytes = 5 + 8;
inline constexpr std::uintmax_t kInstanceMetadataBytes = 3 * 8;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uintmax_t instance_file_size(Index n);

/// Throws std::runtime_error with the path on I/O failure.
void save_instance(const AlignmentInstance& instance, const std::filesystem::path& path);

/// Throws FormatError for a bad magic string, truncation or invalid content.
AlignmentInstance load_instance(const std::filesystem::path& path);

} // namespace gwot
