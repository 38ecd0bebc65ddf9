#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "specrec/bench.hpp"
#include "specrec/cli.hpp"
#include "specrec/encode.hpp"
#include "specrec/errors.hpp"
#include "specrec/eval.hpp"
#include "specrec/io.hpp"
#include "specrec/nnet/checkpoint.hpp"
#include "specrec/parallel.hpp"

namespace specrec::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration file");
  cmd->add_option("--seed", opts.seed_override, "override the master seed");
  cmd->add_option("--threads", opts.threads,
                  "worker threads for per-sample stages (0 = all cores)");
}

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg =
      opts.config_path.empty() ? default_config() : parse_config_file(opts.config_path);
  if (opts.seed_override) {
    cfg.seed.seed = *opts.seed_override;
    cfg.train.seed = cfg.seed;
  }
  if (opts.threads > 0) cfg.threads = opts.threads;
  if (cfg.threads == 0) cfg.threads = default_threads();
  return cfg;
}

// Response matrix resolution: an explicit flag wins, then the config path,
// then a seed-derived synthetic device (written next to generated data so
// later stages can reuse it).
std::pair<ResponseMatrix, WavelengthGrid> obtain_response(
    const RunConfig& cfg, const std::string& flag_path, const fs::path* save_dir) {
  std::string path = !flag_path.empty() ? flag_path : cfg.response_path;
  if (!path.empty()) {
    auto loaded = io::load_response(path);
    if (loaded.first.cols() != cfg.sim.grid.count())
      throw BadConfig("response matrix at '" + path +
                      "' does not match the configured grid");
    return loaded;
  }
  ResponseMatrix r = make_device_response(cfg.arch.input_dim, cfg.sim.grid,
                                          cfg.seed.child("device"));
  if (save_dir) io::save_response(*save_dir / "R.csv", r, cfg.sim.grid);
  return {std::move(r), cfg.sim.grid};
}

void parse_peaks_spec(const std::string& s, SimConfig& sim) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      sim.m_peaks_min = sim.m_peaks_max = std::stoul(s);
    } else {
      sim.m_peaks_min = std::stoul(s.substr(0, dots));
      sim.m_peaks_max = std::stoul(s.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw BadConfig("--peaks wants M or MIN..MAX, got '" + s + "'");
  }
}

int cmd_gen(const CommonOpts& common, const std::string& out_dir, std::size_t n,
            const std::string& response_flag, const std::string& peaks) {
  RunConfig cfg = resolve_config(common);
  if (n < 1) throw BadConfig("--n must be >= 1");
  if (!peaks.empty()) parse_peaks_spec(peaks, cfg.sim);
  cfg.sim.validate();

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  auto [r, grid] = obtain_response(cfg, response_flag, &dir);

  const RngSeed seed = cfg.seed.child("gen");
  const auto pairs = generate_dataset(cfg.sim, r, n, seed, cfg.threads);

  json manifest{{"kind", "simulated"},
                {"seed", io::seed_to_json(seed)},
                {"master_seed", io::seed_to_json(cfg.seed)},
                {"sim_config", io::sim_config_to_json(cfg.sim)},
                {"response_file",
                 !response_flag.empty() ? response_flag
                 : !cfg.response_path.empty() ? cfg.response_path
                                              : std::string("R.csv")}};
  io::save_dataset(dir, pairs, std::move(manifest));
  std::fprintf(stderr, "gen: wrote %zu pairs to %s\n", pairs.size(),
               dir.string().c_str());
  return 0;
}

int cmd_augment(const CommonOpts& common, const std::string& in_dir,
                const std::string& out_dir, const std::string& response_flag) {
  RunConfig cfg = resolve_config(common);
  const fs::path in(in_dir);
  const auto ds = io::load_dataset(in);

  std::string rpath = response_flag;
  if (rpath.empty()) {
    if (!ds.manifest.contains("response_file"))
      throw BadConfig("dataset manifest names no response matrix; pass --response");
    const fs::path rel = ds.manifest.at("response_file").get<std::string>();
    rpath = (rel.is_absolute() ? rel : in / rel).string();
  }
  if (!fs::exists(rpath))
    throw BadConfig("response matrix '" + rpath + "' not found");
  const auto [r, grid] = io::load_response(rpath);
  if (grid.count() != ds.grid.count())
    throw BadConfig("response grid does not match the dataset grid");

  const RngSeed seed = cfg.seed.child("augment");
  std::vector<LabeledPair> out_pairs;
  out_pairs.reserve(ds.pairs.size() * cfg.hda.pairs_per_spectrum());
  json records = json::array();
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    auto cells = augment(ds.pairs[i].x, r, cfg.hda, seed.child("sample", i));
    for (auto& [pair, rec] : cells) {
      records.push_back(json{{"sample", i},
                             {"s", rec.s_index},
                             {"t", rec.t_index},
                             {"delta_seed", io::seed_to_json(rec.delta_seed)},
                             {"eps_seed", io::seed_to_json(rec.eps_seed)}});
      out_pairs.push_back(std::move(pair));
    }
  }

  json manifest{{"kind", "augmented"},
                {"seed", io::seed_to_json(seed)},
                {"hda_config", io::hda_config_to_json(cfg.hda)},
                {"source_dataset", in.string()},
                {"response_file", rpath},
                {"perturbations", std::move(records)}};
  io::save_dataset(out_dir, out_pairs, std::move(manifest));
  std::fprintf(stderr, "augment: %zu pairs -> %zu augmented rows in %s\n",
               ds.pairs.size(), out_pairs.size(), out_dir.c_str());
  return 0;
}

int cmd_train(const CommonOpts& common, const std::string& out_path, bool no_hda,
              const std::string& resume_path, const std::string& response_flag,
              std::optional<std::size_t> iterations_flag,
              std::optional<std::size_t> batch_flag) {
  RunConfig cfg = resolve_config(common);
  cfg.train.use_hda = !no_hda;
  if (iterations_flag) cfg.train.iterations = *iterations_flag;
  if (batch_flag) cfg.train.batch_size = *batch_flag;

  auto [r, grid] = obtain_response(cfg, response_flag, nullptr);

  std::optional<nn::ModelCheckpoint> resume;
  if (!resume_path.empty()) resume = nn::load_checkpoint(resume_path);

  const std::size_t total = cfg.train.iterations;
  const std::size_t tick = std::max<std::size_t>(1, total / 20);
  const auto result =
      nn::train(r, cfg.sim, cfg.hda, cfg.arch, cfg.train,
                resume ? &*resume : nullptr,
                [&](std::size_t it, double loss) {
                  if ((it + 1) % tick == 0 || it + 1 == total)
                    std::fprintf(stderr, "train: iter %zu loss %.6g\n", it + 1, loss);
                });
  nn::save_checkpoint(out_path, result.checkpoint);
  std::fprintf(stderr, "train: saved checkpoint to %s (hda=%s, %llu steps)\n",
               out_path.c_str(), no_hda ? "off" : "on",
               static_cast<unsigned long long>(result.checkpoint.adam_step));
  return 0;
}

fs::path resolve_signals_path(const std::string& in_path) {
  fs::path p(in_path);
  if (fs::is_directory(p)) return p / "y.csv";
  return p;
}

int cmd_reconstruct(const CommonOpts& common, const std::string& in_path,
                    const std::string& out_path, const std::string& ckpt_path,
                    const std::string& solver_name, const std::string& response_flag,
                    const std::string& tv_lambda_flag,
                    std::optional<std::size_t> max_iter_flag,
                    std::optional<double> tol_flag) {
  RunConfig cfg = resolve_config(common);
  if (ckpt_path.empty() == solver_name.empty())
    throw BadConfig("pick exactly one of --checkpoint or --solver");
  if (max_iter_flag) cfg.solver.max_iter = *max_iter_flag;
  if (tol_flag) cfg.solver.tol = *tol_flag;

  const auto signals = io::load_signals(resolve_signals_path(in_path));
  if (signals.empty()) throw BadConfig("no input signals in '" + in_path + "'");

  std::vector<std::vector<double>> rows(signals.size());

  if (!ckpt_path.empty()) {
    const auto ckpt = nn::load_checkpoint(ckpt_path);
    if (signals.front().size() != ckpt.arch.input_dim)
      throw DimensionMismatch("input signals have " +
                              std::to_string(signals.front().size()) +
                              " channels but the model expects " +
                              std::to_string(ckpt.arch.input_dim));
    WavelengthGrid grid = cfg.sim.grid;
    if (grid.count() != ckpt.arch.output_dim)
      grid = WavelengthGrid(grid.start(), grid.step(), ckpt.arch.output_dim);
    // one independent net per worker; inference is stateless between calls
    parallel_for(signals.size(), cfg.threads, [&, grid](std::size_t i) {
      thread_local std::optional<nn::RespecNet> net;
      thread_local const nn::ModelCheckpoint* source = nullptr;
      if (source != &ckpt) {
        net.emplace(nn::restore_net(ckpt));
        source = &ckpt;
      }
      rows[i] = nn::reconstruct(*net, signals[i], grid).values();
    });
  } else {
    auto [r, grid] = obtain_response(cfg, response_flag, nullptr);
    if (signals.front().size() != r.rows())
      throw DimensionMismatch("input signals have " +
                              std::to_string(signals.front().size()) +
                              " channels but R has " + std::to_string(r.rows()) +
                              " rows");
    SolverConfig scfg = cfg.solver;
    if (solver_name == "nnls-tv") {
      if (tv_lambda_flag == "auto" || (tv_lambda_flag.empty() && cfg.solver_lambda_auto)) {
        const auto val =
            generate_dataset(cfg.sim, r, 16, cfg.seed.child("sweep"), cfg.threads);
        scfg.tv_lambda = sweep_tv_lambda(r, val, scfg);
        std::fprintf(stderr, "reconstruct: swept tv_lambda = %g\n", scfg.tv_lambda);
      } else if (!tv_lambda_flag.empty()) {
        scfg.tv_lambda = std::stod(tv_lambda_flag);
      }
    }
    const WavelengthGrid g = grid;
    parallel_for(signals.size(), cfg.threads, [&, g, scfg](std::size_t i) {
      if (solver_name == "ls")
        rows[i] = least_squares(r, signals[i], g).x_hat.values();
      else if (solver_name == "nnls")
        rows[i] = nnls(r, signals[i], g, scfg).x_hat.values();
      else if (solver_name == "nnls-tv")
        rows[i] = nnls_tv(r, signals[i], g, scfg).x_hat.values();
      else
        throw BadConfig("unknown solver '" + solver_name + "' (ls|nnls|nnls-tv)");
    });
  }

  io::write_csv(out_path, rows);
  std::fprintf(stderr, "reconstruct: wrote %zu spectra to %s\n", rows.size(),
               out_path.c_str());
  return 0;
}

int cmd_eval(const CommonOpts& common, const std::string& truth_path,
             const std::string& recon_path, const std::string& out_path,
             const std::string& label) {
  RunConfig cfg = resolve_config(common);
  const auto truth_rows = io::read_csv(truth_path);
  const auto recon_rows = io::read_csv(recon_path);
  if (truth_rows.size() != recon_rows.size())
    throw DimensionMismatch("truth and reconstruction row counts differ");
  if (truth_rows.empty()) throw BadConfig("empty evaluation inputs");

  WavelengthGrid grid = cfg.sim.grid;
  if (truth_rows.front().size() != grid.count())
    grid = WavelengthGrid(grid.start(), grid.step(), truth_rows.front().size());

  std::vector<Spectrum> truth, recon;
  truth.reserve(truth_rows.size());
  recon.reserve(recon_rows.size());
  for (const auto& row : truth_rows) truth.push_back(Spectrum::unchecked(grid, row));
  for (const auto& row : recon_rows) recon.push_back(Spectrum::unchecked(grid, row));

  const auto report = evaluate(truth, recon);

  json per_peak = json::array();
  for (const auto& e : report.per_peak) {
    json row{{"wavelength_nm", e.wavelength_nm},
             {"matched", e.matched},
             {"minor", e.minor}};
    if (e.matched) {
      row["rel_position_error"] = e.rel_position_error;
      row["rel_intensity_error"] = e.rel_intensity_error;
    }
    per_peak.push_back(std::move(row));
  }
  io::write_json(out_path, json{{"label", label},
                                {"mae", report.mae},
                                {"rmse", report.rmse},
                                {"n_unmatched_truth", report.n_unmatched_truth},
                                {"n_spurious", report.n_spurious},
                                {"per_peak", std::move(per_peak)}});

  // figure series: peak position errors, minor-peak intensity errors, and
  // a (label, rmse) row for cross-method comparison plots
  const fs::path out(out_path);
  const fs::path dir = out.parent_path();
  const std::string stem = out.stem().string();
  std::vector<std::vector<double>> pos, inten;
  for (const auto& e : report.per_peak) {
    if (!e.matched) continue;
    pos.push_back({e.wavelength_nm, e.rel_position_error});
    if (e.minor) inten.push_back({e.wavelength_nm, e.rel_intensity_error});
  }
  io::write_csv(dir / (stem + "_positions.csv"), pos);
  io::write_csv(dir / (stem + "_intensities.csv"), inten);
  {
    std::ofstream rmse_csv(dir / (stem + "_rmse.csv"), std::ios::trunc);
    rmse_csv << label << ',' << io::format_double(report.rmse) << '\n';
  }
  std::fprintf(stderr, "eval: mae %.4g rmse %.4g (%zu unmatched, %zu spurious)\n",
               report.mae, report.rmse, report.n_unmatched_truth, report.n_spurious);
  return 0;
}

int cmd_bench(const CommonOpts& common, const std::string& in_dir,
              const std::string& methods_csv, const std::string& ckpt_path,
              const std::string& response_flag, std::size_t repeats,
              const std::string& out_path) {
  RunConfig cfg = resolve_config(common);
  if (repeats < 3) throw BadConfig("--repeats must be >= 3");
  const auto ds = io::load_dataset(in_dir);

  std::vector<std::string> methods;
  {
    std::string item;
    std::istringstream in(methods_csv);
    while (std::getline(in, item, ','))
      if (!item.empty()) methods.push_back(item);
  }
  if (methods.empty()) throw BadConfig("--methods needs at least one method");

  std::optional<nn::ModelCheckpoint> ckpt;
  std::optional<nn::RespecNet> net;
  std::optional<std::pair<ResponseMatrix, WavelengthGrid>> response;
  const auto need_response = [&]() -> auto& {
    if (!response) {
      std::string flag = response_flag;
      if (flag.empty() && ds.manifest.contains("response_file")) {
        const fs::path rel = ds.manifest.at("response_file").get<std::string>();
        flag = (rel.is_absolute() ? rel : fs::path(in_dir) / rel).string();
      }
      response = obtain_response(cfg, flag, nullptr);
    }
    return *response;
  };

  json results = json::object();
  volatile double sink = 0.0;
  std::string hardware;
  for (const auto& method : methods) {
    std::function<void(std::size_t)> runner;
    if (method == "nn") {
      if (ckpt_path.empty()) throw BadConfig("method 'nn' needs --checkpoint");
      if (!ckpt) {
        ckpt = nn::load_checkpoint(ckpt_path);
        net.emplace(nn::restore_net(*ckpt));
      }
      WavelengthGrid grid = cfg.sim.grid;
      if (grid.count() != ckpt->arch.output_dim)
        grid = WavelengthGrid(grid.start(), grid.step(), ckpt->arch.output_dim);
      runner = [&, grid](std::size_t i) {
        sink = nn::reconstruct(*net, ds.pairs[i].y, grid)[0];
      };
    } else if (method == "nnls" || method == "nnls-tv" || method == "ls") {
      auto& [r, grid] = need_response();
      SolverConfig scfg = cfg.solver;
      if (method == "nnls-tv" && cfg.solver_lambda_auto) {
        const auto val =
            generate_dataset(cfg.sim, r, 16, cfg.seed.child("sweep"), cfg.threads);
        scfg.tv_lambda = sweep_tv_lambda(r, val, scfg);
      }
      const WavelengthGrid g = grid;
      if (method == "ls")
        runner = [&, g](std::size_t i) {
          sink = least_squares(r, ds.pairs[i].y, g).x_hat[0];
        };
      else if (method == "nnls")
        runner = [&, g, scfg](std::size_t i) {
          sink = nnls(r, ds.pairs[i].y, g, scfg).x_hat[0];
        };
      else
        runner = [&, g, scfg](std::size_t i) {
          sink = nnls_tv(r, ds.pairs[i].y, g, scfg).x_hat[0];
        };
    } else {
      throw BadConfig("unknown method '" + method + "' (nn|nnls|nnls-tv|ls)");
    }

    const auto res = benchmark(runner, ds.pairs.size(), repeats);
    hardware = res.hardware;
    results[method] = json{{"mean_ms", res.mean_ms}, {"std_ms", res.std_ms}};
    std::fprintf(stderr, "bench: %-8s %.3f +- %.3f ms/sample\n", method.c_str(),
                 res.mean_ms, res.std_ms);
  }

  io::write_json(out_path, json{{"hardware", hardware},
                                {"samples", ds.pairs.size()},
                                {"repeats", repeats},
                                {"results", std::move(results)}});
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"device-informed spectral reconstruction toolkit"};
  app.require_subcommand(1);

  CommonOpts gen_c, aug_c, train_c, rec_c, eval_c, bench_c;

  auto* gen = app.add_subcommand("gen", "generate a simulated dataset");
  add_common(gen, gen_c);
  std::string gen_out;
  std::size_t gen_n = 256;
  std::string gen_response, gen_peaks;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--n", gen_n, "number of pairs");
  gen->add_option("--response", gen_response, "response matrix CSV");
  gen->add_option("--peaks", gen_peaks, "peak count M or MIN..MAX");

  auto* aug = app.add_subcommand("augment", "hierarchically augment a dataset");
  add_common(aug, aug_c);
  std::string aug_in, aug_out, aug_response;
  aug->add_option("--in", aug_in, "input dataset directory")->required();
  aug->add_option("--out", aug_out, "output directory")->required();
  aug->add_option("--response", aug_response, "response matrix CSV");

  auto* tr = app.add_subcommand("train", "train the reconstruction network");
  add_common(tr, train_c);
  std::string tr_out, tr_resume, tr_response;
  bool tr_no_hda = false;
  std::optional<std::size_t> tr_iters, tr_batch;
  tr->add_option("--out", tr_out, "checkpoint output path")->required();
  tr->add_flag("--no-hda", tr_no_hda, "train without augmentation");
  tr->add_option("--resume", tr_resume, "checkpoint to continue from");
  tr->add_option("--response", tr_response, "response matrix CSV");
  tr->add_option("--iterations", tr_iters, "override configured iterations");
  tr->add_option("--batch-size", tr_batch, "override configured batch size");

  auto* rec = app.add_subcommand("reconstruct", "recover spectra from readouts");
  add_common(rec, rec_c);
  std::string rec_in, rec_out, rec_ckpt, rec_solver, rec_response, rec_lambda;
  std::optional<std::size_t> rec_max_iter;
  std::optional<double> rec_tol;
  rec->add_option("--in", rec_in, "y CSV file or dataset directory")->required();
  rec->add_option("--out", rec_out, "output spectra CSV")->required();
  rec->add_option("--checkpoint", rec_ckpt, "trained model checkpoint");
  rec->add_option("--solver", rec_solver, "ls | nnls | nnls-tv");
  rec->add_option("--response", rec_response, "response matrix CSV");
  rec->add_option("--tv-lambda", rec_lambda, "TV weight or 'auto'");
  rec->add_option("--max-iter", rec_max_iter, "solver iteration cap");
  rec->add_option("--tol", rec_tol, "solver tolerance");

  auto* ev = app.add_subcommand("eval", "peak and spectrum metrics");
  add_common(ev, eval_c);
  std::string ev_truth, ev_recon, ev_out, ev_label = "recon";
  ev->add_option("--truth", ev_truth, "ground-truth spectra CSV")->required();
  ev->add_option("--recon", ev_recon, "reconstructed spectra CSV")->required();
  ev->add_option("--out", ev_out, "metrics JSON output")->required();
  ev->add_option("--label", ev_label, "method label for figure rows");

  auto* be = app.add_subcommand("bench", "per-sample timing comparison");
  add_common(be, bench_c);
  std::string be_in, be_methods = "nn,nnls-tv", be_ckpt, be_response, be_out;
  std::size_t be_repeats = 5;
  be->add_option("--in", be_in, "dataset directory")->required();
  be->add_option("--methods", be_methods, "comma list: nn,nnls,nnls-tv,ls");
  be->add_option("--checkpoint", be_ckpt, "model checkpoint for 'nn'");
  be->add_option("--response", be_response, "response matrix CSV");
  be->add_option("--repeats", be_repeats, "timing repeats (>= 3)");
  be->add_option("--out", be_out, "timing JSON output")->required();

  std::vector<const char*> argv;
  argv.push_back("specrec");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (gen->parsed()) return cmd_gen(gen_c, gen_out, gen_n, gen_response, gen_peaks);
    if (aug->parsed()) return cmd_augment(aug_c, aug_in, aug_out, aug_response);
    if (tr->parsed())
      return cmd_train(train_c, tr_out, tr_no_hda, tr_resume, tr_response, tr_iters,
                       tr_batch);
    if (rec->parsed())
      return cmd_reconstruct(rec_c, rec_in, rec_out, rec_ckpt, rec_solver,
                             rec_response, rec_lambda, rec_max_iter, rec_tol);
    if (ev->parsed()) return cmd_eval(eval_c, ev_truth, ev_recon, ev_out, ev_label);
    if (be->parsed())
      return cmd_bench(bench_c, be_in, be_methods, be_ckpt, be_response, be_repeats,
                       be_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "{\"error\":\"BadUsage\",\"message\":%s}\n",
                 json(std::string(e.what())).dump().c_str());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "{\"error\":%s,\"message\":%s}\n",
                 json(e.kind()).dump().c_str(),
                 json(std::string(e.what())).dump().c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"Internal\",\"message\":%s}\n",
                 json(std::string(e.what())).dump().c_str());
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace specrec::cli
