#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mpsm/linalg.hpp"
#include "mpsm/rng.hpp"
#include "mpsm/sampler.hpp"

namespace mpsm {

inline constexpr int kCheckpointFormatVersion = 1;

/// Everything needed to continue a chain bit-exactly.
struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  nlohmann::json config;
  int chain = 0;
  std::int64_t sweep_index = 0;
  double sigma = 0.0;
  RngState rng;
  std::vector<ComplexMatrix> unitaries;
  std::vector<SiteStats> stats;
  double accepted_log_alpha = 0.0;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Little-endian float64, interleaved (re, im), row-major.
std::string encode_matrix(const ComplexMatrix& m);
ComplexMatrix decode_matrix(const std::string& text, Eigen::Index rows, Eigen::Index cols);

nlohmann::json sampler_config_json(const SamplerConfig& config);

nlohmann::json checkpoint_to_json(const Checkpoint& cp);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

Checkpoint make_checkpoint(const ChainState& state, const SamplerConfig& config, int chain, std::int64_t sweep_index);
ChainState restore_chain(const Checkpoint& cp, const BondProfile& profile);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int chain);
/// Writes through a temporary file and renames it into place.
void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mpsm
