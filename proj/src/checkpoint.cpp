#include "mpsm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mpsm/error.hpp"

namespace mpsm {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

void put_le(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

double get_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw ParseError("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + static_cast<std::size_t>(k)];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        vals[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw ParseError("base64: data after padding");
      vals[k] = decode_char(c);
      if (vals[k] < 0) throw ParseError("base64: invalid character");
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::string encode_matrix(const ComplexMatrix& m) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 16);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_le(bytes, m(r, c).real());
      put_le(bytes, m(r, c).imag());
    }
  }
  return base64_encode(bytes);
}

ComplexMatrix decode_matrix(const std::string& text, Eigen::Index rows, Eigen::Index cols) {
  const std::vector<std::uint8_t> bytes = base64_decode(text);
  if (bytes.size() != static_cast<std::size_t>(rows * cols * 16)) {
    throw ParseError("checkpoint: matrix payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                     std::to_string(rows * cols * 16));
  }
  ComplexMatrix m(rows, cols);
  const std::uint8_t* p = bytes.data();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, p += 16) m(r, c) = Complex(get_le(p), get_le(p + 8));
  }
  return m;
}

nlohmann::json sampler_config_json(const SamplerConfig& c) {
  return {{"n_sites", c.n_sites},
          {"local_dim", c.local_dim},
          {"bond_dim", c.max_bond},
          {"samples", c.n_samples},
          {"burn_in_sweeps", c.effective_burn_in()},
          {"thin_sweeps", c.thin_sweeps},
          {"step_size", c.sigma0},
          {"adapt", c.adapt},
          {"seed", c.seed},
          {"chains", c.chains}};
}

nlohmann::json checkpoint_to_json(const Checkpoint& cp) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : cp.unitaries) {
    units.push_back({{"rows", u.rows()}, {"cols", u.cols()}, {"data", encode_matrix(u)}});
  }
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& s : cp.stats) stats.push_back({s.proposed, s.accepted});
  return {{"format_version", cp.format_version},
          {"config", cp.config},
          {"chain", cp.chain},
          {"sweep_index", cp.sweep_index},
          {"sigma", cp.sigma},
          {"rng_state",
           {{"seed", cp.rng.seed}, {"stream", cp.rng.stream}, {"counter", cp.rng.counter}, {"position", cp.rng.position}}},
          {"unitaries", units},
          {"site_stats", stats},
          {"accepted_log_alpha", cp.accepted_log_alpha}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    Checkpoint cp;
    cp.format_version = j.at("format_version").get<int>();
    if (cp.format_version != kCheckpointFormatVersion) {
      throw ParseError("checkpoint: unsupported format_version " + std::to_string(cp.format_version));
    }
    cp.config = j.at("config");
    cp.chain = j.at("chain").get<int>();
    cp.sweep_index = j.at("sweep_index").get<std::int64_t>();
    cp.sigma = j.at("sigma").get<double>();
    const auto& r = j.at("rng_state");
    cp.rng = {r.at("seed").get<std::uint64_t>(), r.at("stream").get<std::uint64_t>(),
              r.at("counter").get<std::uint64_t>(), r.at("position").get<std::uint32_t>()};
    for (const auto& u : j.at("unitaries")) {
      cp.unitaries.push_back(
          decode_matrix(u.at("data").get<std::string>(), u.at("rows").get<Eigen::Index>(), u.at("cols").get<Eigen::Index>()));
    }
    if (j.contains("site_stats")) {
      for (const auto& s : j.at("site_stats")) cp.stats.push_back({s.at(0).get<std::uint64_t>(), s.at(1).get<std::uint64_t>()});
    }
    cp.accepted_log_alpha = j.value("accepted_log_alpha", 0.0);
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

Checkpoint make_checkpoint(const ChainState& state, const SamplerConfig& config, int chain, std::int64_t sweep_index) {
  Checkpoint cp;
  cp.config = sampler_config_json(config);
  cp.chain = chain;
  cp.sweep_index = sweep_index;
  cp.sigma = state.sigma();
  cp.rng = state.rng().state();
  cp.unitaries = state.unitaries();
  cp.stats = state.stats();
  cp.accepted_log_alpha = state.accepted_log_alpha();
  return cp;
}

ChainState restore_chain(const Checkpoint& cp, const BondProfile& profile) {
  if (static_cast<int>(cp.unitaries.size()) != profile.n_sites()) {
    throw InvalidArgument("restore_chain: checkpoint does not match the chain geometry");
  }
  ChainState state(profile, cp.unitaries, RngStream::from_state(cp.rng), cp.sigma);
  if (!cp.stats.empty()) state.restore_counters(cp.stats, cp.accepted_log_alpha);
  return state;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int chain) {
  return dir / ("chain_" + std::to_string(chain) + ".json");
}

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    out << checkpoint_to_json(cp).dump(1) << '\n';
    if (!out) throw IoError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace mpsm
