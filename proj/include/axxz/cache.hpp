#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "axxz/io.hpp"
#include "axxz/params.hpp"
#include "axxz/spectra.hpp"

namespace axxz {

std::uint64_t fnv1a64(std::string_view s);

// resolution order: explicit override (CLI flag), AXXZ_CACHE_DIR, then a
// per-user directory under the system temp path.  "" clears the override.
void set_cache_dir(const std::string& dir);
std::filesystem::path cache_dir();

// stable key over (N, eta, sorted thetas, tolerance block, code version);
// tag names the artifact kind and is part of both the hash and the filename
std::string cache_key(const ModelParams& p, const std::string& tag,
                      const std::string& tol_block);

// false on miss or on an unreadable entry (warning to stderr, caller
// recomputes); entries live at <dir>/<key>.json
bool cache_get(const std::string& key, ojson& out);
void cache_put(const std::string& key, const ojson& doc);

// H eigenvalues ascending, memoized on disk
Eigen::VectorXd cached_energy_levels(const ModelParams& p);

// which record of the joint eigenbasis to extract roots from:
//   ground               index 0
//   first_pair           lowest record classifying as one anti-conjugate
//                        pair plus imaginary roots
//   three_pairs_two_imag lowest record with three pairs and two imaginary
enum class RootScan { ground, first_pair, three_pairs_two_imag };

struct ScanResult {
  int index = -1;
  double energy = 0.0;
  RootSet roots;  // classified
};

ScanResult cached_root_scan(const ModelParams& p, RootScan what);

}  // namespace axxz
