// Copyright 2026 The svptta Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "svptta/adapt.hpp"
#include "svptta/error.hpp"
#include "svptta/harness/benchmark.hpp"
#include "svptta/harness/dataset.hpp"
#include "svptta/harness/experiment.hpp"
#include "svptta/harness/gradcheck.hpp"
#include "svptta/harness/metrics.hpp"
#include "svptta/harness/report.hpp"
#include "svptta/io.hpp"
#include "svptta/model.hpp"

namespace svptta::cli {
namespace fs = std::filesystem;

namespace {

int g_status = 0;

struct AdaptFlags {
  AdaptConfig config;
  std::string method = "svp_sda";
  std::string reset_policy = "never";
  std::string adapt_set = "bn_affine";
  std::optional<std::size_t> total_batches;

  AdaptConfig resolve() const {
    AdaptConfig c = config;
    c.method = parse_method(method);
    c.reset_policy = parse_reset_policy(reset_policy);
    c.adapt_set = parse_adapt_set(adapt_set);
    c.total_batches = total_batches;
    c.validate();
    return c;
  }
};

void add_adapt_flags(CLI::App* sub, AdaptFlags& f) {
  sub->add_option("--method", f.method, "source, norm, tent, tent2, svp_only, ent_svp, "
                                        "sda_only, ent_sda or svp_sda")
      ->capture_default_str();
  sub->add_option("--alpha1", f.config.alpha1, "weight of the singular-value sum term")
      ->capture_default_str();
  sub->add_option("--alpha2", f.config.alpha2, "weight of the singular-value variance term")
      ->capture_default_str();
  sub->add_option("--beta0", f.config.beta0, "augmentation strength after warm-up")
      ->capture_default_str();
  sub->add_option("--t_aug", f.config.t_aug, "augmented copies per sample")
      ->capture_default_str();
  sub->add_option("--lr", f.config.lr, "Adam learning rate")->capture_default_str();
  sub->add_option("--batch_size", f.config.batch_size, "stream batch size")
      ->capture_default_str();
  sub->add_option("--seed", f.config.seed, "adaptation seed")->capture_default_str();
  sub->add_option("--total_batches", f.total_batches,
                  "stream length for the linear beta schedule (unset: warm-up schedule)");
  sub->add_option("--warmup", f.config.warmup, "beta warm-up length in batches")
      ->capture_default_str();
  sub->add_option("--min_count", f.config.min_count,
                  "samples a class needs before it is augmented")
      ->capture_default_str();
  sub->add_option("--reset_policy", f.reset_policy, "never or per_corruption")
      ->capture_default_str();
  sub->add_option("--adapt_set", f.adapt_set, "bn_affine or bn_affine_plus_head")
      ->capture_default_str();
  sub->add_flag("--joint", f.config.joint,
                "one joint update instead of two sequential passes");
}

struct BenchFlags {
  BenchmarkSpec spec;
};

void add_bench_flags(CLI::App* sub, BenchmarkSpec& b) {
  sub->add_option("--classes", b.num_classes, "number of classes")->capture_default_str();
  sub->add_option("--input_dim", b.input_dim, "input width")->capture_default_str();
  sub->add_option("--source_per_class", b.source_per_class)->capture_default_str();
  sub->add_option("--holdout_per_class", b.holdout_per_class)->capture_default_str();
  sub->add_option("--target_per_class", b.target_per_class,
                  "rows of the most frequent class per target split")
      ->capture_default_str();
  sub->add_option("--imbalance_ratio", b.imbalance_ratio,
                  "largest / smallest target class size")
      ->capture_default_str();
  sub->add_option("--corruptions", b.corruptions, "comma-separated corruption names")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--severities", b.severities, "comma-separated severities 0..5")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--class_radius", b.class_radius)->capture_default_str();
  sub->add_option("--input_offset", b.input_offset)->capture_default_str();
}

void write_or_print(const std::string& path, const Json& doc) {
  if (path.empty()) {
    std::fputs(dump_document(doc).c_str(), stdout);
  } else {
    write_document(path, doc);
  }
}

std::string dataset_file(const Dataset& d) {
  return d.meta.corruption + "_" + std::to_string(d.meta.severity) + ".ttad";
}

// ---- gen -------------------------------------------------------------------

void add_gen(CLI::App& app) {
  struct Opts {
    BenchmarkSpec spec;
    std::uint64_t seed = 0;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("gen", "generate a synthetic corruption benchmark");
  sub->add_option("--out", o->out, "output directory")->required();
  sub->add_option("--seed", o->seed, "benchmark seed")->capture_default_str();
  add_bench_flags(sub, o->spec);
  sub->add_option("--config", "flat key = value defaults file");
  sub->callback([o] {
    const Benchmark b = generate_benchmark(o->spec, o->seed);
    std::error_code ec;
    fs::create_directories(o->out, ec);
    if (ec) throw IoError("cannot create '" + o->out + "': " + ec.message());
    const fs::path dir(o->out);
    save_dataset(b.source, dir / "source.ttad");
    save_dataset(b.holdout, dir / "holdout.ttad");
    std::printf("%s\n%s\n", (dir / "source.ttad").c_str(), (dir / "holdout.ttad").c_str());
    for (const Dataset& t : b.targets) {
      save_dataset(t, dir / dataset_file(t));
      std::printf("%s\n", (dir / dataset_file(t)).c_str());
    }
  });
}

// ---- train -----------------------------------------------------------------

void add_train(CLI::App& app) {
  struct Opts {
    std::string data, holdout, out;
    std::vector<std::size_t> hidden = {64, 64, 32};
    TrainConfig train;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("train", "train a source model on a labeled dataset");
  sub->add_option("--data", o->data, "labeled source dataset")->required();
  sub->add_option("--out", o->out, "model file to write")->required();
  sub->add_option("--holdout", o->holdout, "labeled clean dataset to report error on");
  sub->add_option("--hidden", o->hidden, "hidden widths")->delimiter(',')->capture_default_str();
  sub->add_option("--epochs", o->train.epochs)->capture_default_str();
  sub->add_option("--train_batch_size", o->train.batch_size)->capture_default_str();
  sub->add_option("--train_lr", o->train.lr)->capture_default_str();
  sub->add_option("--seed", o->seed, "initialization and shuffling seed")->capture_default_str();
  sub->add_option("--config", "flat key = value defaults file");
  sub->callback([o] {
    const Dataset data = load_dataset(o->data);
    const LabelVector& labels = data.require_labels("training");
    Architecture arch;
    arch.input_dim = data.features.cols();
    arch.hidden = o->hidden;
    arch.num_classes = data.meta.num_classes;
    RandomStream rng = RandomStream(o->seed).fork("train");
    const ModelParams params = train_source(arch, {data.features, labels}, o->train, rng);
    save_model(params, o->out);
    if (!o->holdout.empty()) {
      const Dataset h = load_dataset(o->holdout);
      const ForwardCache c = forward(params, h.features, BnMode::kRunning);
      const Metrics m = evaluate(argmax_rows(c.probabilities),
                                 h.require_labels("holdout evaluation"), arch.num_classes);
      std::printf("clean_error %.6f\n", m.error);
    }
  });
}

// ---- adapt -----------------------------------------------------------------

void add_adapt(CLI::App& app) {
  struct Opts {
    AdaptFlags flags;
    std::string model;
    std::vector<std::string> data;
    std::string report, checkpoint_out, resume;
    std::optional<std::size_t> max_batches;
    bool timing = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("adapt", "adapt a model over a stream of target datasets");
  sub->add_option("--model", o->model, "source model file (not needed with --resume)");
  sub->add_option("--data", o->data, "target datasets, streamed in the given order")
      ->required();
  sub->add_option("--report", o->report, "report document to write (default: stdout)");
  sub->add_option("--checkpoint_out", o->checkpoint_out,
                  "write the adaptation state after the last processed batch");
  sub->add_option("--resume", o->resume,
                  "continue from a checkpoint; its configuration replaces the flags");
  sub->add_option("--max_batches", o->max_batches, "stop after this many batches");
  sub->add_flag("--timing", o->timing, "include wall-clock time in the report");
  add_adapt_flags(sub, o->flags);
  sub->add_option("--config", "flat key = value defaults file");
  sub->callback([o] {
    AdaptConfig config;
    AdaptState state;
    if (!o->resume.empty()) {
      state = checkpoint_from_json(read_document(o->resume), &config);
    } else {
      if (o->model.empty()) throw ConfigError("adapt needs --model or --resume");
      config = o->flags.resolve();
      state = make_adapt_state(load_model(o->model), config);
    }
    std::vector<Dataset> targets;
    for (const std::string& path : o->data) targets.push_back(load_dataset(path));
    const std::vector<StreamBatch> all = chunk_stream(targets, config.batch_size);
    const std::size_t begin = std::min(state.batch_counter, all.size());
    std::size_t end = all.size();
    if (o->max_batches) end = std::min(end, begin + *o->max_batches);
    const std::span<const StreamBatch> todo(all.data() + begin, end - begin);

    const auto start = std::chrono::steady_clock::now();
    StreamReport report = run_stream(state, todo, config);
    if (o->timing) {
      report.wall_clock_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    write_or_print(o->report, to_json(report));
    if (!o->checkpoint_out.empty()) write_document(o->checkpoint_out, checkpoint_to_json(state, config));
    if (!o->report.empty()) {
      if (report.error) {
        std::printf("batches %zu error %.6f\n", report.batches.size(), *report.error);
      } else {
        std::printf("batches %zu\n", report.batches.size());
      }
    }
  });
}

// ---- sweep / ablate ----------------------------------------------------------

struct ExperimentOpts {
  AdaptFlags flags;
  ExperimentSpec spec;
  std::uint64_t seed = 0;
  std::size_t seeds = 5;
  std::string out;
};

void add_experiment_flags(CLI::App* sub, ExperimentOpts& o) {
  sub->add_option("--seeds", o.seeds, "number of seeds, counting up from --seed")
      ->capture_default_str();
  sub->add_option("--num_batches", o.spec.num_batches, "stream length in batches")
      ->capture_default_str();
  sub->add_option("--epochs", o.spec.train.epochs, "source training epochs")
      ->capture_default_str();
  sub->add_option("--out", o.out, "document to write (default: stdout)");
  add_bench_flags(sub, o.spec.bench);
  add_adapt_flags(sub, o.flags);
  sub->add_option("--config", "flat key = value defaults file");
}

std::vector<PreparedRun> prepare_runs(ExperimentOpts& o, const AdaptConfig& base) {
  if (o.seeds == 0) throw ConfigError("--seeds must be positive");
  o.spec.batch_size = base.batch_size;
  std::vector<PreparedRun> runs;
  for (std::size_t i = 0; i < o.seeds; ++i) runs.push_back(prepare_run(o.spec, base.seed + i));
  return runs;
}

Json summary_json(const Summary& s) {
  return {{"values", s.values}, {"mean", s.mean}, {"stddev", s.stddev},
          {"stderr", s.stderr_mean}};
}

void add_sweep(CLI::App& app) {
  struct Opts : ExperimentOpts {
    std::vector<double> alpha1 = {0.0, 0.5, 1.0};
    std::vector<double> alpha2 = {0.0, 0.3, 1.0};
    std::vector<double> beta0 = {0.0, 0.5, 1.0};
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("sweep", "grid over alpha1, alpha2 and beta0");
  add_experiment_flags(sub, *o);
  sub->add_option("--alpha1_grid", o->alpha1)->delimiter(',')->capture_default_str();
  sub->add_option("--alpha2_grid", o->alpha2)->delimiter(',')->capture_default_str();
  sub->add_option("--beta0_grid", o->beta0)->delimiter(',')->capture_default_str();
  sub->callback([o] {
    const AdaptConfig base = o->flags.resolve();
    const std::vector<PreparedRun> runs = prepare_runs(*o, base);
    Json rows = Json::array();
    for (const SweepPoint& p : run_sweep(runs, base, o->alpha1, o->alpha2, o->beta0)) {
      rows.push_back({{"alpha1", p.alpha1},
                      {"alpha2", p.alpha2},
                      {"beta0", p.beta0},
                      {"error", summary_json(p.error)}});
    }
    write_or_print(o->out, {{"schema", "svptta.sweep/1"},
                            {"config", to_json(base)},
                            {"seeds", o->seeds},
                            {"points", std::move(rows)}});
  });
}

void add_ablate(CLI::App& app) {
  auto o = std::make_shared<ExperimentOpts>();
  CLI::App* sub = app.add_subcommand("ablate", "loss-term ablation arms");
  add_experiment_flags(sub, *o);
  sub->callback([o] {
    const AdaptConfig base = o->flags.resolve();
    const std::vector<PreparedRun> runs = prepare_runs(*o, base);
    Json arms = Json::array();
    for (const NamedConfig& arm : ablation_arms(base)) {
      std::vector<double> errors;
      for (const PreparedRun& run : runs) {
        AdaptConfig c = arm.config;
        c.seed = run.seed;
        errors.push_back(run_method(run, c).report.error.value_or(0.0));
      }
      arms.push_back({{"name", arm.name},
                      {"config", to_json(arm.config)},
                      {"error", summary_json(summarize(errors))}});
    }
    write_or_print(o->out, {{"schema", "svptta.ablation/1"},
                            {"seeds", o->seeds},
                            {"arms", std::move(arms)}});
  });
}

// ---- diag ------------------------------------------------------------------

void add_diag(CLI::App& app) {
  struct Opts {
    std::string model, data, out, embeddings;
    std::string mode = "batch";
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub =
      app.add_subcommand("diag", "class-distance matrix and singular-value truncation curve");
  sub->add_option("--model", o->model)->required();
  sub->add_option("--data", o->data, "labeled dataset")->required();
  sub->add_option("--mode", o->mode, "batch or running BN statistics")->capture_default_str();
  sub->add_option("--out", o->out, "document to write (default: stdout)");
  sub->add_option("--export_embeddings", o->embeddings,
                  "CSV of features with label and prediction columns");
  sub->add_option("--config", "flat key = value defaults file");
  sub->callback([o] {
    BnMode mode;
    if (o->mode == "batch") {
      mode = BnMode::kBatch;
    } else if (o->mode == "running") {
      mode = BnMode::kRunning;
    } else {
      throw ConfigError("--mode must be batch or running");
    }
    const ModelParams params = load_model(o->model);
    const Dataset data = load_dataset(o->data);
    const Diagnostics d = compute_diagnostics(params, data, mode);
    write_or_print(o->out, {{"schema", "svptta.diagnostics/1"},
                            {"mode", o->mode},
                            {"class_distances", to_json(d.class_distances)},
                            {"truncation_error", d.truncation_error},
                            {"truncation_per_class_error",
                             to_json(d.truncation_per_class_error)}});
    if (!o->embeddings.empty()) {
      std::string csv;
      for (std::size_t a = 0; a < d.features.cols(); ++a) csv += "f" + std::to_string(a) + ",";
      csv += "label,prediction\n";
      char buf[32];
      for (std::size_t r = 0; r < d.features.rows(); ++r) {
        for (double v : d.features.row(r)) {
          std::snprintf(buf, sizeof buf, "%.9g,", v);
          csv += buf;
        }
        csv += std::to_string(d.labels[r]) + "," + std::to_string(d.predictions[r]) + "\n";
      }
      write_file_atomic(o->embeddings, std::string_view(csv));
    }
  });
}

// ---- gradcheck -------------------------------------------------------------

void add_gradcheck(CLI::App& app) {
  auto o = std::make_shared<GradcheckOptions>();
  CLI::App* sub = app.add_subcommand("gradcheck", "finite-difference audit of all gradients");
  sub->add_option("--instances", o->loss_instances, "random instances per loss")
      ->capture_default_str();
  sub->add_option("--network_instances", o->network_instances,
                  "random networks per end-to-end check")
      ->capture_default_str();
  sub->add_option("--seed", o->seed)->capture_default_str();
  sub->add_option("--config", "flat key = value defaults file");
  sub->callback([o] {
    bool ok = true;
    for (const GradcheckCase& c : run_gradcheck(*o)) {
      std::printf("%-20s %4zu instances  max rel err %.3e  tol %.0e  %s\n", c.name.c_str(),
                  c.instances, c.max_relative_error, c.tolerance, c.passed ? "ok" : "FAIL");
      ok = ok && c.passed;
    }
    g_status = ok ? 0 : 1;
  });
}

}  // namespace

void add_commands(CLI::App& app) {
  add_gen(app);
  add_train(app);
  add_adapt(app);
  add_sweep(app);
  add_ablate(app);
  add_diag(app);
  add_gradcheck(app);
}

int command_status() { return g_status; }

}  // namespace svptta::cli
