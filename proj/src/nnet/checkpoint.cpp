#include "specrec/nnet/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"
#include "specrec/errors.hpp"

namespace specrec::nn {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'R', 'S', 'P', 'N'};
constexpr std::uint32_t kVersion = 1;

json arch_to_json(const RespecArch& a) {
  return json{{"input_dim", a.input_dim},
              {"output_dim", a.output_dim},
              {"rec_fc_dims", a.rec_fc_dims},
              {"dropout_p", a.dropout_p},
              {"conv_channels", a.conv_channels},
              {"conv_kernel", a.conv_kernel},
              {"pool_width", a.pool_width},
              {"rf_fc_dims", a.rf_fc_dims}};
}

RespecArch arch_from_json(const json& j) {
  RespecArch a;
  a.input_dim = j.at("input_dim").get<std::size_t>();
  a.output_dim = j.at("output_dim").get<std::size_t>();
  a.rec_fc_dims = j.at("rec_fc_dims").get<std::vector<std::size_t>>();
  a.dropout_p = j.at("dropout_p").get<double>();
  a.conv_channels = j.at("conv_channels").get<std::vector<std::size_t>>();
  a.conv_kernel = j.at("conv_kernel").get<std::size_t>();
  a.pool_width = j.at("pool_width").get<std::size_t>();
  a.rf_fc_dims = j.at("rf_fc_dims").get<std::vector<std::size_t>>();
  return a;
}

json meta_to_json(const TrainMeta& m) {
  return json{{"iterations", m.iterations},
              {"loss_history_tail", m.loss_history_tail},
              {"seed", {{"seed", m.seed.seed}, {"stream_label", m.seed.stream_label}}},
              {"hda_config_hash", m.hda_config_hash},
              {"hda", m.hda_enabled}};
}

TrainMeta meta_from_json(const json& j) {
  TrainMeta m;
  m.iterations = j.at("iterations").get<std::uint64_t>();
  m.loss_history_tail = j.at("loss_history_tail").get<std::vector<double>>();
  m.seed.seed = j.at("seed").at("seed").get<std::uint64_t>();
  m.seed.stream_label = j.at("seed").at("stream_label").get<std::string>();
  m.hda_config_hash = j.at("hda_config_hash").get<std::string>();
  m.hda_enabled = j.at("hda").get<bool>();
  return m;
}

struct Writer {
  std::ofstream out;

  explicit Writer(const std::filesystem::path& p)
      : out(p, std::ios::binary | std::ios::trunc) {
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  }
  void bytes(const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out) throw IoError("short write to checkpoint file");
  }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void f64s(const std::vector<double>& v) { bytes(v.data(), v.size() * 8); }
  void named_array(const std::string& name, const std::vector<std::size_t>& dims,
                   const std::vector<double>& data) {
    str(name);
    u32(static_cast<std::uint32_t>(dims.size()));
    for (std::size_t d : dims) u64(d);
    f64s(data);
  }
};

struct Reader {
  std::ifstream in;

  explicit Reader(const std::filesystem::path& p) : in(p, std::ios::binary) {
    if (!in) throw IoError("cannot open '" + p.string() + "' for reading");
  }
  void bytes(void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      throw TruncatedFile("checkpoint ends mid-record");
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 24)) throw TruncatedFile("implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  std::pair<std::vector<std::size_t>, std::vector<double>> array_body() {
    const std::uint32_t nd = u32();
    if (nd > 8) throw TruncatedFile("implausible tensor rank");
    std::vector<std::size_t> dims(nd);
    std::size_t numel = 1;
    for (auto& d : dims) {
      d = static_cast<std::size_t>(u64());
      numel *= d;
    }
    if (numel > (1ull << 32)) throw TruncatedFile("implausible tensor size");
    std::vector<double> data(numel);
    bytes(data.data(), numel * 8);
    return {std::move(dims), std::move(data)};
  }
};

}  // namespace

ModelCheckpoint snapshot(RespecNet& net, const Adam& adam, TrainMeta meta) {
  ModelCheckpoint ckpt;
  ckpt.arch = net.arch();
  for (auto& [name, t] : net.named_params()) {
    Tensor copy;
    copy.shape = t->shape;
    copy.data = t->data;
    ckpt.params.emplace_back(name, std::move(copy));
  }
  ckpt.adam_step = adam.step_count();
  ckpt.adam_m = adam.m();
  ckpt.adam_v = adam.v();
  ckpt.meta = std::move(meta);
  return ckpt;
}

RespecNet restore_net(const ModelCheckpoint& ckpt) {
  RespecNet net(ckpt.arch, RngSeed{0, "restore"});
  auto params = net.named_params();
  if (params.size() != ckpt.params.size())
    throw DimensionMismatch("checkpoint parameter count does not match the arch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].first != ckpt.params[i].first)
      throw DimensionMismatch("checkpoint parameter '" + ckpt.params[i].first +
                              "' out of order (expected '" + params[i].first + "')");
    if (params[i].second->data.size() != ckpt.params[i].second.data.size())
      throw DimensionMismatch("checkpoint parameter '" + ckpt.params[i].first +
                              "' has the wrong size");
    params[i].second->data = ckpt.params[i].second.data;
  }
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt) {
  Writer w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.str(arch_to_json(ckpt.arch).dump());

  w.u32(static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, t] : ckpt.params) w.named_array(name, t.shape, t.data);

  w.u64(ckpt.adam_step);
  w.u32(static_cast<std::uint32_t>(ckpt.params.size()));
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    const auto& [name, t] = ckpt.params[i];
    w.named_array(name + ".m", t.shape, ckpt.adam_m[i]);
    w.named_array(name + ".v", t.shape, ckpt.adam_v[i]);
  }

  w.str(meta_to_json(ckpt.meta).dump());
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw BadMagic("not a checkpoint file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw VersionMismatch("checkpoint version " + std::to_string(version) +
                          " unsupported (want " + std::to_string(kVersion) + ")");

  ModelCheckpoint ckpt;
  try {
    ckpt.arch = arch_from_json(json::parse(r.str()));
  } catch (const json::exception& e) {
    throw TruncatedFile(std::string("arch header unreadable: ") + e.what());
  }

  const std::uint32_t n_params = r.u32();
  for (std::uint32_t i = 0; i < n_params; ++i) {
    const std::string name = r.str();
    auto [dims, data] = r.array_body();
    Tensor t;
    t.shape = std::move(dims);
    t.data = std::move(data);
    t.check();
    ckpt.params.emplace_back(name, std::move(t));
  }

  ckpt.adam_step = r.u64();
  const std::uint32_t n_adam = r.u32();
  if (n_adam != n_params)
    throw TruncatedFile("optimizer state count does not match parameters");
  for (std::uint32_t i = 0; i < n_adam; ++i) {
    r.str();
    ckpt.adam_m.push_back(r.array_body().second);
    r.str();
    ckpt.adam_v.push_back(r.array_body().second);
  }

  try {
    ckpt.meta = meta_from_json(json::parse(r.str()));
  } catch (const json::exception& e) {
    throw TruncatedFile(std::string("meta footer unreadable: ") + e.what());
  }
  return ckpt;
}

}  // namespace specrec::nn
