/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "drivenet/config/experiment.hpp"

namespace drivenet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {"synth", "train", "eval", "kfold", "ablate"};
  return v;
}

struct Command {
  std::string verb;
  std::optional<std::string> config_path;
  std::optional<std::string> profile;
  std::string out_dir = "out";
  std::optional<std::string> data_dir;
  std::optional<std::string> checkpoint;
  std::optional<long> seed;
  std::optional<int> workers;
  std::optional<std::string> scenario;
  std::optional<std::string> horizons;
  std::optional<std::string> presets;
  bool otc = false;
  bool quiet = false;
  std::vector<std::string> overrides;
};

/// One machine-parsable line: `error kind=<kind> verb=<verb> msg=<text>`.
inline std::string error_line(const std::string& kind, const std::string& verb, std::string msg) {
  for (auto& c : msg)
    if (c == '\n' || c == '\r') c = ' ';
  return "error kind=" + kind + " verb=" + (verb.empty() ? "-" : verb) + " msg=" + msg;
}

/// Flags become overrides applied after the config file.
inline config::ExperimentConfig resolve_command(const Command& cmd) {
  config::ResolveRequest req;
  if (cmd.profile) req.profile = config::parse_profile(*cmd.profile);
  if (cmd.config_path) req.config_path = *cmd.config_path;
  req.overrides = cmd.overrides;
  if (cmd.seed) {
    const auto s = std::to_string(*cmd.seed);
    for (const char* k : {"train.seed", "data.synthetic_seed", "data.split_seed"}) req.overrides.push_back(std::string(k) + "=" + s);
  }
  if (cmd.workers) req.overrides.push_back("train.workers=" + std::to_string(*cmd.workers));
  if (cmd.scenario) req.overrides.push_back("model.scenario=" + *cmd.scenario);
  if (cmd.horizons) req.overrides.push_back("eval.horizons=" + *cmd.horizons);
  if (cmd.presets) req.overrides.push_back("eval.presets=" + *cmd.presets);
  if (cmd.otc) req.overrides.push_back("eval.otc=true");
  if (cmd.data_dir) req.overrides.push_back("data.root=" + *cmd.data_dir);
  return config::resolve(req);
}

namespace detail {

struct Context {
  const Command& cmd;
  const config::ExperimentConfig& cfg;
  fs::path out;
  std::ostream& log;

  void note(const std::string& s) const {
    if (!cmd.quiet) log << s << '\n';
  }
};

inline DatasetManifest open_manifest(const config::ExperimentConfig& cfg) {
  const fs::path path = fs::path(cfg.get("data.root")) / "manifest.csv";
  if (!fs::exists(path)) throw Error("manifest not found: " + path.string());
  return read_manifest(path);
}

inline HoldoutSplit split_manifest(const config::ExperimentConfig& cfg) {
  return holdout_split(open_manifest(cfg), cfg.get_real("data.split_ratio"),
                       static_cast<std::uint64_t>(cfg.get_int("data.split_seed")));
}

inline train::Trainer::EpochCallback epoch_logger(const Context& ctx, int epochs, const std::string& tag = "") {
  return [&ctx, epochs, tag](const train::EpochRecord& r) {
    std::ostringstream s;
    s << tag << "epoch " << r.epoch << '/' << epochs << " loss " << r.loss << " train_acc " << r.train_accuracy;
    if (r.val_accuracy) s << " val_acc " << *r.val_accuracy;
    s << " (" << std::fixed << std::setprecision(1) << r.wall_seconds << " s)";
    ctx.note(s.str());
  };
}

inline eval::Report base_report(const config::ExperimentConfig& cfg) {
  eval::Report r;
  r.config_hash = cfg.hash();
  r.scenario = cfg.get("model.scenario");
  r.method = cfg.get_bool("eval.otc") ? eval::kMethodOtc : eval::kMethodPlain;
  return r;
}

inline int do_synth(const Context& ctx) {
  const fs::path dir = ctx.cmd.data_dir ? fs::path(*ctx.cmd.data_dir) : ctx.out;
  const auto m = generate_synthetic(ctx.cfg.synthetic(), dir);
  ctx.note("wrote " + std::to_string(m.size()) + " clips to " + dir.string());
  return kExitOk;
}

inline int do_train(const Context& ctx) {
  const auto split = split_manifest(ctx.cfg);
  const auto tc = ctx.cfg.train();
  ctx.note("training on " + std::to_string(split.train.size()) + " clips, scenario " + ctx.cfg.get("model.scenario"));
  const auto result = train::train(split.train, tc, epoch_logger(ctx, tc.epochs));
  net::save_checkpoint(ctx.out / "model.ckpt", result.final_model, result.meta);
  net::save_checkpoint(ctx.out / "best.ckpt", result.best_model, result.meta);
  result.history.write_csv(ctx.out / "history.csv");
  ctx.note("wrote " + (ctx.out / "model.ckpt").string());
  return kExitOk;
}

inline int do_eval(const Context& ctx) {
  const fs::path ckpt = ctx.cmd.checkpoint ? fs::path(*ctx.cmd.checkpoint) : ctx.out / "model.ckpt";
  const auto expected = ctx.cfg.model();
  auto loaded = net::load_checkpoint(ckpt, &expected);
  const auto split = split_manifest(ctx.cfg);
  const auto opt = ctx.cfg.eval_options();
  const auto clips = train::load_clips(split.test, net::active_branches(expected.scenario), opt.workers);
  auto report = base_report(ctx.cfg);
  report.horizons = eval::horizon_eval(loaded.model, clips, opt);
  eval::emit_report(report, ctx.out, ctx.cfg.report_formats());
  for (const auto& h : report.horizons)
    ctx.note("T=" + std::to_string(h.metrics.horizon) + " accuracy " +
             eval::detail::fmt(eval::percent2(h.metrics.accuracy)) + "%");
  return kExitOk;
}

inline int do_kfold(const Context& ctx) {
  const auto manifest = open_manifest(ctx.cfg);
  auto tc = ctx.cfg.train();
  tc.val_fraction = 0.0;
  const auto opt = ctx.cfg.eval_options();
  const auto clips = train::load_clips(manifest, net::active_branches(tc.model.scenario), opt.workers);
  auto report = base_report(ctx.cfg);
  report.method = eval::kMethodPlain;
  report.kfold = eval::kfold_run(manifest, clips, static_cast<int>(ctx.cfg.get_int("eval.k_folds")), tc, opt,
                                 ctx.cfg.get_bool("eval.otc"), [&](const std::string& s) { ctx.note(s); });
  eval::emit_report(report, ctx.out, ctx.cfg.report_formats());
  for (const auto& m : report.kfold->methods)
    for (const auto& row : m.rows)
      ctx.note(m.method + " T=" + std::to_string(row.horizon) + " " + eval::detail::fmt(row.accuracy.mean) +
               " +- " + eval::detail::fmt(row.accuracy.stddev));
  return kExitOk;
}

inline int do_ablate(const Context& ctx) {
  const auto split = split_manifest(ctx.cfg);
  auto tc = ctx.cfg.train();
  tc.val_fraction = 0.0;
  const auto opt = ctx.cfg.eval_options();
  const auto branches = net::active_branches(tc.model.scenario);
  const auto fit = train::load_clips(split.train, branches, opt.workers);
  const auto test = train::load_clips(split.test, branches, opt.workers);
  auto report = base_report(ctx.cfg);
  report.ablation = eval::ablation_run(fit, test, ctx.cfg.get("eval.presets"), tc, opt,
                                       [&](const std::string& s) { ctx.note(s); });
  eval::emit_report(report, ctx.out, ctx.cfg.report_formats());
  return kExitOk;
}

}  // namespace detail

/// Runs one parsed command; every run writes resolved_config.ini to its
/// output directory (the dataset directory for synth).
inline int run(const Command& cmd, std::ostream& log, std::ostream& err) {
  config::ExperimentConfig cfg;
  try {
    if (std::find(verbs().begin(), verbs().end(), cmd.verb) == verbs().end()) {
      err << error_line("usage", cmd.verb, "unknown verb " + cmd.verb) << '\n';
      return kExitUsage;
    }
    cfg = resolve_command(cmd);
  } catch (const ConfigError& e) {
    err << error_line("config", cmd.verb, e.what()) << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << error_line("config", cmd.verb, e.what()) << '\n';
    return kExitUsage;
  }
  try {
    const fs::path out = cmd.verb == "synth" && cmd.data_dir ? fs::path(*cmd.data_dir) : fs::path(cmd.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw Error("cannot create output directory " + out.string());
    cfg.write_resolved(out / "resolved_config.ini");
    const detail::Context ctx{cmd, cfg, out, log};
    if (cmd.verb == "synth") return detail::do_synth(ctx);
    if (cmd.verb == "train") return detail::do_train(ctx);
    if (cmd.verb == "eval") return detail::do_eval(ctx);
    if (cmd.verb == "kfold") return detail::do_kfold(ctx);
    return detail::do_ablate(ctx);
  } catch (const ConfigError& e) {
    err << error_line("config", cmd.verb, e.what()) << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << error_line("runtime", cmd.verb, e.what()) << '\n';
    return kExitRuntime;
  }
}

/// Parses argv (`drivenet <verb> [flags] [section.key=value ...]`) and runs.
inline int main(int argc, char** argv, std::ostream& log = std::cerr, std::ostream& err = std::cerr) {
  if (argc < 2) {
    err << error_line("usage", "", "missing verb; expected one of synth, train, eval, kfold, ablate") << '\n';
    return kExitUsage;
  }
  const std::string first = argv[1];
  if (first == "-h" || first == "--help") {
    log << "usage: drivenet {synth,train,eval,kfold,ablate} [options] [section.key=value ...]\n";
    return kExitOk;
  }
  Command cmd;
  cmd.verb = first;
  if (std::find(verbs().begin(), verbs().end(), cmd.verb) == verbs().end()) {
    err << error_line("usage", cmd.verb, "unknown verb " + cmd.verb) << '\n';
    return kExitUsage;
  }
  CLI::App app("drivenet " + cmd.verb, "drivenet");
  std::string profile, scenario, horizons, presets, config_path, data, checkpoint;
  long seed = 0;
  int workers = 1;
  auto* o_config = app.add_option("--config", config_path, "experiment config file (INI)");
  auto* o_profile = app.add_option("--profile", profile, "defaults profile")->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--out", cmd.out_dir, "output directory");
  auto* o_data = app.add_option("--data", data, "dataset directory (synth writes here)");
  auto* o_ckpt = app.add_option("--checkpoint", checkpoint, "checkpoint to evaluate");
  auto* o_seed = app.add_option("--seed", seed, "seed for data, split and training");
  auto* o_workers = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* o_scenario =
      app.add_option("--scenario", scenario)->check(CLI::IsMember({"inside_only", "outside_only", "both"}));
  auto* o_horizons = app.add_option("--horizons", horizons, "comma-separated horizons, e.g. 0,-1,-2");
  auto* o_presets = app.add_option("--presets", presets, "ablation presets, e.g. A,B,C,D,E");
  app.add_flag("--otc", cmd.otc, "test-time voting over original, translated and cutout variants");
  app.add_flag("--quiet", cmd.quiet, "suppress progress lines");
  app.add_option("overrides", cmd.overrides, "section.key=value overrides");
  try {
    std::vector<std::string> rest;
    for (int i = argc - 1; i >= 2; --i) rest.emplace_back(argv[i]);
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    log << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_line("usage", cmd.verb, e.what()) << '\n';
    return kExitUsage;
  }
  if (*o_config) cmd.config_path = config_path;
  if (*o_profile) cmd.profile = profile;
  if (*o_data) cmd.data_dir = data;
  if (*o_ckpt) cmd.checkpoint = checkpoint;
  if (*o_seed) cmd.seed = seed;
  if (*o_workers) cmd.workers = workers;
  if (*o_scenario) cmd.scenario = scenario;
  if (*o_horizons) cmd.horizons = horizons;
  if (*o_presets) cmd.presets = presets;
  return run(cmd, log, err);
}

}  // namespace drivenet::cli
