#include "mpsm/experiment.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "mpsm/error.hpp"
#include "mpsm/spectra.hpp"

namespace mpsm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw InvalidArgument("unknown format '" + name + "' (expected csv or json)");
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string version_string() { return "0.1.0"; }

int threads_from_env() {
  const char* s = std::getenv("MPSM_THREADS");
  if (!s || !*s) return 0;
  int v = 0;
  const auto r = std::from_chars(s, s + std::char_traits<char>::length(s), v);
  if (r.ec != std::errc() || *r.ptr != '\0' || v < 1) {
    throw InvalidArgument(std::string("MPSM_THREADS must be a positive integer, got '") + s + "'");
  }
  return v;
}

// ---- config ---------------------------------------------------------------

SamplerConfig ExperimentConfig::sampler_config() const {
  SamplerConfig s;
  s.n_sites = n_sites;
  s.local_dim = local_dim;
  s.max_bond = bond_dim;
  s.n_samples = samples;
  s.burn_in_sweeps = burn_in_sweeps;
  s.thin_sweeps = thin_sweeps;
  s.sigma0 = step_size;
  s.adapt = adapt;
  s.seed = seed;
  s.chains = chains;
  return s;
}

void ExperimentConfig::validate() const {
  if (n_sites < 2) throw InvalidArgument("n_sites must be >= 2");
  if (local_dim < 2) throw InvalidArgument("local_dim must be >= 2");
  if (bond_dim < 1) throw InvalidArgument("bond_dim must be >= 1");
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  if (out_dir.empty()) throw InvalidArgument("out_dir must not be empty");
  (void)profile();
  if (ensemble == Ensemble::fs) {
    if (chains < 1) throw InvalidArgument("chains must be >= 1");
    if (static_cast<std::size_t>(chains) > samples) throw InvalidArgument("chains must not exceed samples");
    if (thin_sweeps < 1) throw InvalidArgument("thin_sweeps must be >= 1");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw InvalidArgument("step_size must be positive");
  }
  if (ensemble == Ensemble::central && profile().hilbert_dim(kStatevectorLimit + 1) == 0) {
    throw InvalidArgument("central ensemble is contracted densely and needs d^N <= 2^24");
  }
}

json ExperimentConfig::to_json() const {
  return {{"n_sites", n_sites},
          {"local_dim", local_dim},
          {"bond_dim", bond_dim},
          {"ensemble", mpsm::to_string(ensemble)},
          {"samples", samples},
          {"chains", chains},
          {"burn_in_sweeps", burn_in_sweeps < 0 ? 50 * n_sites : burn_in_sweeps},
          {"thin_sweeps", thin_sweeps},
          {"step_size", step_size},
          {"adapt", adapt},
          {"seed", seed},
          {"out_dir", out_dir},
          {"format", mpsm::to_string(format)}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw InvalidArgument("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n_sites") c.n_sites = v.get<int>();
      else if (key == "local_dim") c.local_dim = v.get<int>();
      else if (key == "bond_dim") c.bond_dim = v.get<int>();
      else if (key == "ensemble") c.ensemble = parse_ensemble(v.get<std::string>());
      else if (key == "samples") c.samples = v.get<std::size_t>();
      else if (key == "chains") c.chains = v.get<int>();
      else if (key == "burn_in_sweeps") c.burn_in_sweeps = v.get<int>();
      else if (key == "thin_sweeps") c.thin_sweeps = v.get<int>();
      else if (key == "step_size") c.step_size = v.get<double>();
      else if (key == "adapt") c.adapt = v.get<bool>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "format") c.format = parse_format(v.get<std::string>());
      else throw InvalidArgument("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config file: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) { return from_json(j, ExperimentConfig{}); }

// ---- output ---------------------------------------------------------------

namespace {

// Rows of mixed text/number cells, rendered either as csv or as a json table.
class TableWriter {
public:
  explicit TableWriter(std::string header) : header_(std::move(header)) {}

  void row(std::initializer_list<json> cells) { rows_.emplace_back(cells); }

  fs::path write(const fs::path& dir, const std::string& stem, OutputFormat format) const {
    const fs::path path = dir / (stem + (format == OutputFormat::csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    if (format == OutputFormat::csv) {
      std::string text = header_ + "\n";
      for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          if (i) text += ',';
          text += cell_text(r[i]);
        }
        text += '\n';
      }
      out << text;
    } else {
      json columns = json::array();
      std::stringstream ss(header_);
      for (std::string col; std::getline(ss, col, ',');) columns.push_back(col);
      out << json{{"columns", columns}, {"rows", rows_}}.dump() << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
    return path;
  }

  static std::string cell_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
  }

private:
  std::string header_;
  std::vector<std::vector<json>> rows_;
};

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".mpsm_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace

SampleOutput cmd_sample(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(config.out_dir);
  prepare_dir(dir);

  const BondProfile profile = config.profile();
  const std::string ens = to_string(config.ensemble);
  SampleOutput result;
  if (config.ensemble == Ensemble::fs) {
    FsRun run = run_fs_sampler(config.sampler_config(), exec);
    for (auto& s : run.samples) result.samples.push_back(std::move(s.summary));
    result.chains = std::move(run.chains);
  } else {
    result.samples = sample_summaries(exec, profile, config.ensemble, config.samples, RngStream(config.seed, 0));
  }

  const double log2_cap = std::log2(static_cast<double>(config.bond_dim));
  TableWriter prof(kProfileHeader), spec(kSpectrumHeader);
  for (std::size_t k = 0; k < result.samples.size(); ++k) {
    const SampleSummary& s = result.samples[k];
    for (int cut = 1; cut < profile.n_sites(); ++cut) {
      const auto uc = static_cast<std::size_t>(cut - 1);
      const double bits = s.entropies[uc];
      prof.row({ens, k, cut, bits, log2_cap > 0.0 ? bits / log2_cap : 0.0});
      const RealVector& ev = s.spectra[uc];
      const double scale = profile.bond(cut);
      for (Eigen::Index i = 0; i < ev.size(); ++i) spec.row({ens, k, cut, i, ev(i), scale * ev(i)});
    }
  }
  result.files.push_back(prof.write(dir, "profile", config.format));
  result.files.push_back(spec.write(dir, "spectrum", config.format));

  json chains = json::array();
  if (config.ensemble == Ensemble::fs) {
    TableWriter diag(kDiagnosticsHeader);
    for (const auto& rep : result.chains) {
      for (std::size_t t = 0; t < rep.log_weight_trace.size(); ++t) {
        diag.row({rep.chain, rep.first_sweep + static_cast<std::int64_t>(t) + 1, rep.log_weight_trace[t],
                  rep.accept_trace[t], rep.sigma_trace[t]});
      }
      json c = {{"chain", rep.chain}, {"final_step_size", rep.final_sigma}};
      if (rep.diagnostics) {
        c["autocorr_time"] = rep.diagnostics->autocorr_time;
        c["ess"] = rep.diagnostics->ess;
        c["stationary"] = rep.diagnostics->stationary;
        c["geweke_z"] = rep.diagnostics->geweke_z;
      }
      chains.push_back(c);
    }
    result.files.push_back(diag.write(dir, "diagnostics", config.format));
  }

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json files = json::array();
  for (const auto& f : result.files) files.push_back(f.filename().string());
  const json meta = {{"config", config.to_json()},
                     {"seed", config.seed},
                     {"version", version_string()},
                     {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                           "." + std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__},
                     {"threads", thread_count()},
                     {"wall_time_s", result.wall_seconds},
                     {"files", files},
                     {"chains", chains}};
  const fs::path meta_path = dir / "run_meta.json";
  std::ofstream out(meta_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + meta_path.string());
  out << meta.dump(2) << '\n';
  result.files.push_back(meta_path);
  return result;
}

// ---- input ----------------------------------------------------------------

Table read_table(const fs::path& path, const std::string& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string name = path.filename().string();
  Table t;
  std::stringstream hs(expected_header);
  for (std::string col; std::getline(hs, col, ',');) t.header.push_back(col);

  if (path.extension() == ".json") {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError(name + ": " + e.what());
    }
    if (!j.contains("columns") || j["columns"] != json(t.header)) {
      throw ParseError(name + ": columns must be " + expected_header);
    }
    std::size_t r = 0;
    for (const auto& row : j.value("rows", json::array())) {
      ++r;
      if (!row.is_array() || row.size() != t.header.size()) {
        throw ParseError(name + " row " + std::to_string(r) + ": expected " + std::to_string(t.header.size()) +
                         " fields");
      }
      std::vector<std::string> fields;
      for (const auto& v : row) fields.push_back(TableWriter::cell_text(v));
      t.rows.push_back(std::move(fields));
    }
    return t;
  }

  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) throw ParseError(name + " row 1: header must be '" + expected_header + "'");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != t.header.size()) {
      throw ParseError(name + " row " + std::to_string(row) + ": expected " + std::to_string(t.header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

namespace {

template <class T>
T parse_field(const std::string& text, const std::string& file, std::size_t row, const std::string& column) {
  T v{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ParseError(file + " row " + std::to_string(row) + ": bad " + column + " value '" + text + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) {
      throw ParseError(file + " row " + std::to_string(row) + ": non-finite " + column + " value '" + text + "'");
    }
  }
  return v;
}

struct Geometry {
  int n_sites = 0;
  int local_dim = 0;
  int bond_dim = 0;
};

std::optional<Geometry> geometry_from_meta(const fs::path& dir) {
  const fs::path meta = dir / "run_meta.json";
  if (!fs::exists(meta)) return std::nullopt;
  std::ifstream in(meta);
  try {
    json j;
    in >> j;
    const auto& c = j.at("config");
    return Geometry{c.at("n_sites").get<int>(), c.at("local_dim").get<int>(), c.at("bond_dim").get<int>()};
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

double paired_z(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw InsufficientData("paired_z needs two equal series of length >= 2");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double m = mean_of(diff);
  double ss = 0.0;
  for (double v : diff) ss += (v - m) * (v - m);
  const double se = std::sqrt(ss / (diff.size() - 1) / diff.size());
  if (se == 0.0) return m == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), m);
  return m / se;
}

json cmd_analyze(const AnalyzeOptions& opt) {
  if (opt.law != "mp") throw InvalidArgument("unknown law '" + opt.law + "' (only mp is available)");
  if (opt.bins < 1) throw InvalidArgument("bins must be >= 1");
  if (opt.moments < 1 || opt.moments > kMaxSeriesOrder) throw InvalidArgument("moments must be in [1, 16]");

  const Table spec = read_table(opt.spectrum, kSpectrumHeader);
  const std::string sname = opt.spectrum.filename().string();
  if (spec.rows.empty()) throw InsufficientData(sname + ": no data");

  struct Entry {
    int cut;
    std::size_t sample;
    int index;
    double scaled;
  };
  std::vector<Entry> entries;
  std::string ensemble_name;
  int max_cut = 0, max_index = 0;
  std::map<std::size_t, int> first_cut_count;
  for (std::size_t r = 0; r < spec.rows.size(); ++r) {
    const auto& f = spec.rows[r];
    const std::size_t row = r + 2;
    if (ensemble_name.empty()) ensemble_name = f[0];
    if (f[0] != ensemble_name) throw ParseError(sname + " row " + std::to_string(row) + ": mixed ensembles");
    Entry e{parse_field<int>(f[2], sname, row, "cut"), parse_field<std::size_t>(f[1], sname, row, "sample"),
            parse_field<int>(f[3], sname, row, "index"), parse_field<double>(f[5], sname, row, "scaled_eigenvalue")};
    (void)parse_field<double>(f[4], sname, row, "eigenvalue");
    if (e.cut < 1 || e.index < 0) throw ParseError(sname + " row " + std::to_string(row) + ": cut/index out of range");
    max_cut = std::max(max_cut, e.cut);
    max_index = std::max(max_index, e.index);
    if (e.cut == 1) ++first_cut_count[e.sample];
    entries.push_back(e);
  }
  Ensemble ensemble;
  try {
    ensemble = parse_ensemble(ensemble_name);
  } catch (const InvalidArgument&) {
    throw ParseError(sname + " row 2: unknown ensemble '" + ensemble_name + "'");
  }

  Geometry g;
  if (auto m = geometry_from_meta(opt.spectrum.parent_path())) {
    g = *m;
  } else {
    g = {max_cut + 1, first_cut_count.empty() ? 2 : first_cut_count.begin()->second, max_index + 1};
  }
  const BondProfile profile(g.n_sites, std::max(g.local_dim, 2), g.bond_dim);
  const int cut = opt.cut.value_or(equilibrium_cut(profile, ensemble));
  if (cut < 1 || cut >= profile.n_sites() || !profile.is_saturated(cut)) {
    throw InvalidArgument("cut " + std::to_string(cut) + " is not a saturated interior cut");
  }
  const double c = opt.c.value_or(ensemble == Ensemble::fs ? fs_aspect_ratio(profile.local_dim())
                                                           : 1.0 / profile.local_dim());
  const MpLaw law(c);

  std::vector<double> x;
  for (const auto& e : entries)
    if (e.cut == cut) x.push_back(e.scaled);
  if (x.empty()) throw InsufficientData(sname + ": no data at cut " + std::to_string(cut));

  json out;
  out["input"] = opt.spectrum.string();
  out["ensemble"] = ensemble_name;
  out["geometry"] = {{"n_sites", g.n_sites}, {"local_dim", g.local_dim}, {"bond_dim", g.bond_dim}};
  out["cut"] = cut;
  out["law"] = opt.law;
  out["c"] = c;
  out["n_eigenvalues"] = x.size();
  out["ks"] = ks_distance(x, [&](double v) { return law.cdf(v); });

  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = std::min(*lo_it, law.lower()), hi = std::max(*hi_it, law.upper());
  const double width = (hi - lo) / opt.bins;
  std::vector<double> counts(static_cast<std::size_t>(opt.bins), 0.0), edges, centers, ref;
  for (double v : x) {
    auto b = static_cast<std::size_t>(width > 0.0 ? (v - lo) / width : 0.0);
    counts[std::min(b, counts.size() - 1)] += 1.0;
  }
  for (int b = 0; b <= opt.bins; ++b) edges.push_back(lo + b * width);
  for (int b = 0; b < opt.bins; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    counts[ub] /= (x.size() * (width > 0.0 ? width : 1.0));
    centers.push_back(lo + (b + 0.5) * width);
    ref.push_back(law.density(centers.back()));
  }
  out["histogram"] = {{"edges", edges}, {"density", counts}, {"reference_density", ref}};

  std::vector<double> emp;
  for (int k = 1; k <= opt.moments; ++k) {
    double s = 0.0;
    for (double v : x) s += std::pow(v, k);
    emp.push_back(s / x.size());
  }
  out["moments"] = {{"empirical", emp}, {"reference", mp_moments(c, opt.moments)}};

  if (!opt.profile.empty()) {
    const Table prof = read_table(opt.profile, kProfileHeader);
    const std::string pname = opt.profile.filename().string();
    if (prof.rows.empty()) throw InsufficientData(pname + ": no data");
    std::map<int, std::map<std::size_t, double>> by_cut;
    int n_cuts = 0;
    for (std::size_t r = 0; r < prof.rows.size(); ++r) {
      const auto& f = prof.rows[r];
      const int k = parse_field<int>(f[2], pname, r + 2, "cut");
      by_cut[k][parse_field<std::size_t>(f[1], pname, r + 2, "sample")] =
          parse_field<double>(f[3], pname, r + 2, "entropy_bits");
      n_cuts = std::max(n_cuts, k);
    }
    auto series = [&](int k) {
      std::vector<double> v;
      for (const auto& [s, val] : by_cut[k]) v.push_back(val);
      return v;
    };
    const int n = n_cuts + 1;
    json mean_profile = json::array();
    for (int k = 1; k < n; ++k) mean_profile.push_back({{"cut", k}, {"mean_entropy_bits", mean_of(series(k))}});
    json flips = json::array();
    double max_z = 0.0;
    for (int l = 1; 2 * l < n; ++l) {
      const double z = paired_z(series(l), series(n - l));
      max_z = std::max(max_z, std::abs(z));
      flips.push_back({{"cut", l}, {"mirror", n - l}, {"mean_diff", mean_of(series(l)) - mean_of(series(n - l))},
                       {"z", z}});
    }
    out["profile"] = {{"input", opt.profile.string()}, {"mean", mean_profile}, {"flip_symmetry", flips},
                      {"max_abs_flip_z", max_z}};
  }

  const fs::path target = opt.output.empty() ? opt.spectrum.parent_path() / "analysis.json" : opt.output;
  std::ofstream f(target, std::ios::trunc);
  if (!f) throw IoError("cannot write " + target.string());
  f << out.dump(2) << '\n';
  return out;
}

}  // namespace mpsm
