#include "specrec/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "specrec/errors.hpp"

namespace specrec::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{})
        throw IoError(path.string() + ":" + std::to_string(lineno) +
                      ": not a number near '" + std::string(p, std::min<std::size_t>(8, end - p)) + "'");
      row.push_back(v);
      p = res.ptr;
      if (p < end) {
        if (*p != ',')
          throw IoError(path.string() + ":" + std::to_string(lineno) +
                        ": expected ',' separator");
        ++p;
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": ragged row widths");
    rows.push_back(std::move(row));
  }
  return rows;
}

json grid_to_json(const WavelengthGrid& g) {
  return json{{"start", g.start()}, {"step", g.step()}, {"count", g.count()}};
}

WavelengthGrid grid_from_json(const json& j) {
  return WavelengthGrid(j.at("start").get<double>(), j.at("step").get<double>(),
                        j.at("count").get<std::size_t>());
}

json seed_to_json(const RngSeed& s) {
  return json{{"seed", s.seed}, {"stream_label", s.stream_label}};
}

RngSeed seed_from_json(const json& j) {
  return RngSeed{j.at("seed").get<std::uint64_t>(),
                 j.at("stream_label").get<std::string>()};
}

json sim_config_to_json(const SimConfig& cfg) {
  return json{{"m_peaks_min", cfg.m_peaks_min},
              {"m_peaks_max", cfg.m_peaks_max},
              {"mu_range", {cfg.mu_range.lo, cfg.mu_range.hi}},
              {"gamma_range", {cfg.gamma_range.lo, cfg.gamma_range.hi}},
              {"intensity_range", {cfg.intensity_range.lo, cfg.intensity_range.hi}},
              {"grid", grid_to_json(cfg.grid)}};
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig cfg;
  cfg.m_peaks_min = j.at("m_peaks_min").get<std::size_t>();
  cfg.m_peaks_max = j.at("m_peaks_max").get<std::size_t>();
  cfg.mu_range = {j.at("mu_range")[0].get<double>(), j.at("mu_range")[1].get<double>()};
  cfg.gamma_range = {j.at("gamma_range")[0].get<double>(),
                     j.at("gamma_range")[1].get<double>()};
  cfg.intensity_range = {j.at("intensity_range")[0].get<double>(),
                         j.at("intensity_range")[1].get<double>()};
  cfg.grid = grid_from_json(j.at("grid"));
  return cfg;
}

json hda_config_to_json(const HdaConfig& cfg) {
  return json{{"s_outer", cfg.s_outer},       {"t_inner", cfg.t_inner},
              {"alpha", cfg.alpha},           {"sigma_eps", cfg.sigma_eps},
              {"r_noise", "gaussian_proportional"},
              {"y_noise", "relu_gaussian"},
              {"clamp_response", cfg.clamp_response},
              {"sigma_relative", cfg.sigma_relative}};
}

HdaConfig hda_config_from_json(const json& j) {
  HdaConfig cfg;
  cfg.s_outer = j.at("s_outer").get<std::size_t>();
  cfg.t_inner = j.at("t_inner").get<std::size_t>();
  cfg.alpha = j.at("alpha").get<double>();
  cfg.sigma_eps = j.at("sigma_eps").get<double>();
  cfg.clamp_response = j.value("clamp_response", false);
  cfg.sigma_relative = j.value("sigma_relative", false);
  return cfg;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

namespace {

std::filesystem::path sidecar_of(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void save_response(const std::filesystem::path& csv_path, const ResponseMatrix& r,
                   const WavelengthGrid& grid) {
  std::vector<std::vector<double>> rows(r.rows());
  for (std::size_t i = 0; i < r.rows(); ++i)
    rows[i].assign(r.row(i), r.row(i) + r.cols());
  write_csv(csv_path, rows);
  write_json(sidecar_of(csv_path),
             json{{"source_id", r.source_id()},
                  {"K", r.rows()},
                  {"L", r.cols()},
                  {"grid", grid_to_json(grid)}});
}

std::pair<ResponseMatrix, WavelengthGrid> load_response(
    const std::filesystem::path& csv_path) {
  const json meta = read_json(sidecar_of(csv_path));
  const auto grid = grid_from_json(meta.at("grid"));
  const auto rows = read_csv(csv_path);
  const std::size_t k = meta.at("K").get<std::size_t>();
  const std::size_t l = meta.at("L").get<std::size_t>();
  if (rows.size() != k || (k > 0 && rows.front().size() != l))
    throw IoError(csv_path.string() + ": matrix shape does not match its sidecar");
  if (l != grid.count())
    throw IoError(csv_path.string() + ": sidecar grid count differs from L");
  std::vector<double> entries;
  entries.reserve(k * l);
  for (const auto& row : rows) entries.insert(entries.end(), row.begin(), row.end());
  return {ResponseMatrix(k, l, std::move(entries),
                         meta.at("source_id").get<std::string>()),
          grid};
}

void save_dataset(const std::filesystem::path& dir,
                  const std::vector<LabeledPair>& pairs, json manifest) {
  if (pairs.empty()) throw InvalidArgument("refusing to write an empty dataset");
  std::filesystem::create_directories(dir);

  std::vector<std::vector<double>> xs, ys;
  xs.reserve(pairs.size());
  ys.reserve(pairs.size());
  json samples = json::array();
  for (const auto& p : pairs) {
    xs.push_back(p.x.values());
    ys.push_back(p.y.values());
    json seeds = json::array();
    for (const auto& s : p.seed_trace) seeds.push_back(seed_to_json(s));
    json rec{{"provenance", to_string(p.provenance)}, {"seeds", std::move(seeds)}};
    if (p.provenance == Provenance::Augmented) {
      rec["s"] = p.s_index;
      rec["t"] = p.t_index;
    }
    samples.push_back(std::move(rec));
  }
  write_csv(dir / "x.csv", xs);
  write_csv(dir / "y.csv", ys);

  manifest["schema"] = "specrec-dataset/1";
  manifest["n"] = pairs.size();
  manifest["grid"] = grid_to_json(pairs.front().x.grid());
  manifest["samples"] = std::move(samples);
  write_json(dir / "manifest.json", manifest);
}

LoadedDataset load_dataset(const std::filesystem::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  if (manifest.value("schema", "") != "specrec-dataset/1")
    throw BadConfig(dir.string() + ": unknown dataset schema");
  const auto grid = grid_from_json(manifest.at("grid"));
  const auto xs = read_csv(dir / "x.csv");
  const auto ys = read_csv(dir / "y.csv");
  if (xs.size() != ys.size())
    throw IoError(dir.string() + ": x.csv and y.csv row counts differ");

  LoadedDataset out{{}, manifest, grid};
  const json& samples = manifest.at("samples");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    LabeledPair p{Spectrum(grid, xs[i]), EncodedSignal::raw(ys[i]),
                  Provenance::External, -1, -1, {}};
    if (i < samples.size()) {
      const json& rec = samples[i];
      p.provenance = provenance_from_string(rec.at("provenance").get<std::string>());
      p.s_index = rec.value("s", -1);
      p.t_index = rec.value("t", -1);
      for (const auto& s : rec.at("seeds")) p.seed_trace.push_back(seed_from_json(s));
    }
    out.pairs.push_back(std::move(p));
  }
  return out;
}

std::vector<EncodedSignal> load_signals(const std::filesystem::path& csv_path) {
  const auto rows = read_csv(csv_path);
  std::vector<EncodedSignal> out;
  out.reserve(rows.size());
  bool warned = false;
  for (const auto& row : rows) {
    if (!warned) {
      for (double v : row) {
        if (v < 0.0) {
          std::fprintf(stderr,
                       "warning: %s contains negative readouts; keeping them\n",
                       csv_path.string().c_str());
          warned = true;
          break;
        }
      }
    }
    out.push_back(EncodedSignal::raw(row));
  }
  return out;
}

}  // namespace specrec::io
