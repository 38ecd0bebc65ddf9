#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "specrec/cli.hpp"
#include "specrec/errors.hpp"

namespace specrec::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KvFile {
  // insertion-ordered section.key -> value
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, bool> consumed;

  void add(const std::string& key, const std::string& value, const std::string& origin,
           std::size_t line) {
    if (consumed.count(key))
      throw BadConfig(origin + ":" + std::to_string(line) + ": duplicate key '" +
                      key + "'");
    entries.emplace_back(key, value);
    consumed[key] = false;
  }

  const std::string* find(const std::string& key) {
    for (const auto& [k, v] : entries)
      if (k == key) {
        consumed[k] = true;
        return &v;
      }
    return nullptr;
  }

  void reject_unconsumed(const std::string& origin) const {
    for (const auto& [k, used] : consumed)
      if (!used) throw BadConfig(origin + ": unknown key '" + k + "'");
  }
};

KvFile scan(const std::string& text, const std::string& origin) {
  KvFile kv;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw BadConfig(origin + ":" + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw BadConfig(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw BadConfig(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw BadConfig(origin + ":" + std::to_string(lineno) + ": empty key");
    kv.add(section.empty() ? key : section + "." + key, value, origin, lineno);
  }
  return kv;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw BadConfig("key '" + key + "': '" + s + "' is not a number");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw BadConfig("key '" + key + "': '" + s + "' is not a non-negative integer");
  return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw BadConfig("key '" + key + "': '" + s + "' is not a boolean");
}

std::vector<std::size_t> parse_dims(const std::string& s, const std::string& key) {
  std::vector<std::size_t> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<std::size_t>(parse_u64(item, key)));
  }
  if (out.empty()) throw BadConfig("key '" + key + "': empty list");
  return out;
}

struct Loader {
  KvFile& kv;

  template <typename T, typename Fn>
  void get(const std::string& key, T& slot, Fn&& parse) {
    if (const std::string* v = kv.find(key)) slot = parse(*v, key);
  }
  void num(const std::string& key, double& slot) {
    get(key, slot, [](const std::string& s, const std::string& k) {
      return parse_double(s, k);
    });
  }
  void count(const std::string& key, std::size_t& slot) {
    get(key, slot, [](const std::string& s, const std::string& k) {
      return static_cast<std::size_t>(parse_u64(s, k));
    });
  }
  void flag(const std::string& key, bool& slot) {
    get(key, slot, [](const std::string& s, const std::string& k) {
      return parse_bool(s, k);
    });
  }
  void dims(const std::string& key, std::vector<std::size_t>& slot) {
    get(key, slot, [](const std::string& s, const std::string& k) {
      return parse_dims(s, k);
    });
  }
};

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  KvFile kv = scan(text, origin);

  if (const std::string* v = kv.find("version")) {
    if (*v != "1") throw BadConfig(origin + ": unsupported config version '" + *v + "'");
  } else {
    throw BadConfig(origin + ": missing 'version' key");
  }

  RunConfig cfg;
  Loader ld{kv};

  double grid_start = cfg.sim.grid.start(), grid_step = cfg.sim.grid.step();
  std::size_t grid_count = cfg.sim.grid.count();
  ld.num("grid.start", grid_start);
  ld.num("grid.step", grid_step);
  ld.count("grid.count", grid_count);
  const WavelengthGrid grid(grid_start, grid_step, grid_count);
  cfg.sim = SimConfig::for_grid(grid);

  ld.count("simgen.peaks_min", cfg.sim.m_peaks_min);
  ld.count("simgen.peaks_max", cfg.sim.m_peaks_max);
  ld.num("simgen.mu_min", cfg.sim.mu_range.lo);
  ld.num("simgen.mu_max", cfg.sim.mu_range.hi);
  ld.num("simgen.gamma_min", cfg.sim.gamma_range.lo);
  ld.num("simgen.gamma_max", cfg.sim.gamma_range.hi);
  ld.num("simgen.intensity_min", cfg.sim.intensity_range.lo);
  ld.num("simgen.intensity_max", cfg.sim.intensity_range.hi);

  ld.count("hda.s", cfg.hda.s_outer);
  ld.count("hda.t", cfg.hda.t_inner);
  ld.num("hda.alpha", cfg.hda.alpha);
  ld.num("hda.sigma_eps", cfg.hda.sigma_eps);
  ld.flag("hda.clamp_response", cfg.hda.clamp_response);
  ld.flag("hda.sigma_relative", cfg.hda.sigma_relative);

  cfg.arch.output_dim = grid.count();
  ld.count("arch.input_dim", cfg.arch.input_dim);
  ld.count("arch.output_dim", cfg.arch.output_dim);
  ld.dims("arch.rec_fc_dims", cfg.arch.rec_fc_dims);
  ld.num("arch.dropout_p", cfg.arch.dropout_p);
  ld.dims("arch.conv_channels", cfg.arch.conv_channels);
  ld.count("arch.conv_kernel", cfg.arch.conv_kernel);
  ld.count("arch.pool_width", cfg.arch.pool_width);
  ld.dims("arch.rf_fc_dims", cfg.arch.rf_fc_dims);

  ld.count("train.batch_size", cfg.train.batch_size);
  ld.num("train.learning_rate", cfg.train.learning_rate);
  ld.count("train.iterations", cfg.train.iterations);
  ld.num("train.adam_beta1", cfg.train.adam_beta1);
  ld.num("train.adam_beta2", cfg.train.adam_beta2);
  ld.num("train.adam_eps", cfg.train.adam_eps);

  if (const std::string* v = kv.find("solver.tv_lambda")) {
    if (*v == "auto") {
      cfg.solver_lambda_auto = true;
    } else {
      cfg.solver.tv_lambda = parse_double(*v, "solver.tv_lambda");
      cfg.solver_lambda_auto = false;
    }
  }
  ld.count("solver.max_iter", cfg.solver.max_iter);
  ld.num("solver.tol", cfg.solver.tol);
  if (const std::string* v = kv.find("solver.step_rule")) {
    if (*v == "fixed") cfg.solver.step_rule = StepRule::FixedLipschitz;
    else if (*v == "backtracking") cfg.solver.step_rule = StepRule::Backtracking;
    else throw BadConfig("solver.step_rule must be 'fixed' or 'backtracking'");
  }

  if (const std::string* v = kv.find("paths.response")) cfg.response_path = *v;

  ld.get("seed.value", cfg.seed.seed, [](const std::string& s, const std::string& k) {
    return parse_u64(s, k);
  });
  if (const std::string* v = kv.find("seed.label")) cfg.seed.stream_label = *v;

  kv.reject_unconsumed(origin);

  cfg.sim.validate();
  cfg.hda.validate();
  cfg.arch.validate();
  cfg.train.validate();
  cfg.solver.validate();
  if (cfg.arch.output_dim != grid.count())
    throw BadConfig(origin + ": arch.output_dim must equal grid.count");
  cfg.train.seed = cfg.seed;
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace specrec::cli
