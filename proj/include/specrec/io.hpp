#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "specrec/hda.hpp"
#include "specrec/simgen.hpp"
#include "specrec/types.hpp"

namespace specrec::io {

// Shortest round-trip decimal form; identical doubles always print the same
// bytes, which is what makes rerun outputs byte-comparable.
std::string format_double(double v);

// Plain CSV of doubles, one sample per row, no header.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path);

nlohmann::json grid_to_json(const WavelengthGrid& g);
WavelengthGrid grid_from_json(const nlohmann::json& j);
nlohmann::json seed_to_json(const RngSeed& s);
RngSeed seed_from_json(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json hda_config_to_json(const HdaConfig& cfg);
HdaConfig hda_config_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Response matrix: K x L CSV plus a sidecar JSON (same stem, .json) with
// {source_id, K, L, grid}.
void save_response(const std::filesystem::path& csv_path, const ResponseMatrix& r,
                   const WavelengthGrid& grid);
std::pair<ResponseMatrix, WavelengthGrid> load_response(
    const std::filesystem::path& csv_path);

// Dataset directory: x.csv (n x L), y.csv (n x K), manifest.json carrying
// grid, seeds, configs, and per-sample provenance.
void save_dataset(const std::filesystem::path& dir,
                  const std::vector<LabeledPair>& pairs, nlohmann::json manifest);
struct LoadedDataset {
  std::vector<LabeledPair> pairs;
  nlohmann::json manifest;
  WavelengthGrid grid;
};
LoadedDataset load_dataset(const std::filesystem::path& dir);

// y-only loader for reconstruction inputs; negative readouts are accepted
// with a warning on stderr.
std::vector<EncodedSignal> load_signals(const std::filesystem::path& csv_path);

}  // namespace specrec::io
