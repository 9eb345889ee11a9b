// scorex: trajectory scoring, score extrapolation and data-pruning runs.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>

#include "scorex/config.hpp"
#include "scorex/manifest.hpp"
#include "scorex/metrics.hpp"
#include "scorex/pipeline.hpp"
#include "scorex/synth.hpp"
#include "scorex/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace scorex;

namespace {

struct GlobalFlags {
  int threads = 1;
  bool deterministic = false;
};

void emit_timings(const std::vector<StageTiming>& timings) {
  for (const auto& t : timings) {
    std::fprintf(stderr, "timing %s: %.6fs\n", t.stage.c_str(), t.seconds);
  }
}

DenseTensor labels_to_tensor(const std::vector<std::int32_t>& labels) {
  DenseTensor t;
  t.shape = {labels.size()};
  t.data.reserve(labels.size());
  for (auto v : labels) t.data.push_back(static_cast<float>(v));
  return t;
}

std::vector<std::int32_t> tensor_to_labels(const DenseTensor& t) {
  require(t.rank() == 1, ErrorCode::ShapeMismatch, "labels tensor must be 1-d");
  std::vector<std::int32_t> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const float v = t.data[i];
    require(v >= 0.0f && v == std::floor(v), ErrorCode::LabelOutOfRange,
            "labels must be non-negative integers");
    out[i] = static_cast<std::int32_t>(v);
  }
  return out;
}

// ---------------------------------------------------------------- score ---

struct ScoreArgs {
  std::string traj, labels, subset, out;
  int window = 10;
  double beta = 0.9;
};

void run_score(ScorerKind kind, const ScoreArgs& args, const GlobalFlags& flags) {
  ScorerConfig cfg;
  cfg.window = args.window;
  cfg.beta = args.beta;
  cfg.threads = flags.deterministic ? 1 : flags.threads;

  const DenseTensor traj = read_tensor(args.traj);
  std::vector<double> scores;
  switch (kind) {
    case ScorerKind::du: {
      ProbTrajectory probs;
      if (traj.rank() == 2) {
        probs = ProbTrajectory::from_tensor(traj);
      } else {
        require(!args.labels.empty(), ErrorCode::ConfigInvalid,
                "du over a (E,n,C) trajectory needs --labels");
        probs = select_label_column(DistTrajectory::from_tensor(traj),
                                    tensor_to_labels(read_tensor(args.labels)));
      }
      scores = du_score(probs, cfg);
      break;
    }
    case ScorerKind::tdds:
      scores = tdds_score(DistTrajectory::from_tensor(traj), cfg);
      break;
    case ScorerKind::unsupervised_du:
      scores = unsupervised_du(DistTrajectory::from_tensor(traj), cfg);
      break;
  }

  ScoreTable table;
  if (!args.subset.empty()) {
    const IndexSet subset = read_index_set(args.subset);
    require(subset.universe_size == static_cast<std::int64_t>(scores.size()),
            ErrorCode::ShapeMismatch, "subset universe does not match trajectory");
    for (std::int64_t id : subset.indices) {
      table.rows.push_back({id, scores[static_cast<std::size_t>(id)], Provenance::computed,
                            true});
    }
  } else {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      table.rows.push_back({static_cast<std::int64_t>(i), scores[i], Provenance::computed,
                            true});
    }
  }
  write_score_table(args.out, table);

  RunManifest manifest(std::string("score ") + scorer_kind_name(kind));
  manifest.add_config("trajectory", args.traj);
  manifest.add_config("window", std::to_string(args.window));
  if (kind == ScorerKind::tdds) manifest.add_config("beta", format_score(args.beta));
  manifest.add_output(args.out);
  manifest.write(args.out + ".manifest", !flags.deterministic);
}

// ---------------------------------------------------------- extrapolate ---

struct ExtrapolateArgs {
  std::string embeddings, scores, labels, out, save_model;
  std::size_t k = 0;
  bool normalize = false;
  std::uint64_t seed = 0;
  GnnTrainConfig gnn;
};

void run_extrapolate(ExtrapolatorKind kind, const ExtrapolateArgs& args,
                     const GlobalFlags& flags) {
  const DenseTensor embeddings = read_tensor(args.embeddings);
  require(embeddings.rank() == 2, ErrorCode::ShapeMismatch,
          "embeddings must have shape (n, d')");
  const std::size_t n = embeddings.dim(0);
  const std::size_t dim = embeddings.dim(1);

  ScoreTable subset_table = read_score_table(args.scores);
  IndexSet subset;
  subset.universe_size = static_cast<std::int64_t>(n);
  for (const ScoreRow& row : subset_table.rows) {
    require(row.in_subset, ErrorCode::ConfigInvalid,
            "subset score table must carry in_subset=true rows only");
    subset.indices.push_back(row.sample_id);
  }
  subset.validate();

  ScoreTable extrapolated;
  if (kind == ExtrapolatorKind::knn) {
    const IndexSet residual = subset.complement();
    std::vector<float> subset_emb(subset.size() * dim);
    std::vector<double> subset_scores(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) {
      const std::size_t id = static_cast<std::size_t>(subset.indices[i]);
      std::copy_n(embeddings.data.begin() + static_cast<std::ptrdiff_t>(id * dim), dim,
                  subset_emb.begin() + static_cast<std::ptrdiff_t>(i * dim));
      subset_scores[i] = subset_table.rows[i].score;
    }
    std::vector<float> query_emb(residual.size() * dim);
    for (std::size_t i = 0; i < residual.size(); ++i) {
      const std::size_t id = static_cast<std::size_t>(residual.indices[i]);
      std::copy_n(embeddings.data.begin() + static_cast<std::ptrdiff_t>(id * dim), dim,
                  query_emb.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    KnnExtrapolationConfig cfg;
    cfg.k = args.k == 0 ? 20 : args.k;
    cfg.normalize_embeddings = args.normalize;
    cfg.threads = flags.deterministic ? 1 : flags.threads;
    const auto predicted = knn_extrapolate(subset_emb, subset.size(), dim, subset_scores,
                                           query_emb, residual.size(), cfg);
    for (std::size_t i = 0; i < residual.size(); ++i) {
      extrapolated.rows.push_back({residual.indices[i], predicted[i],
                                   Provenance::extrapolated_knn, false});
    }
  } else {
    std::vector<std::int32_t> labels;
    std::size_t num_classes = 0;
    if (!args.labels.empty()) {
      labels = tensor_to_labels(read_tensor(args.labels));
      for (auto c : labels) num_classes = std::max(num_classes, static_cast<std::size_t>(c) + 1);
    }
    const SampleGraph graph =
        build_graph(embeddings.data, n, dim, args.k == 0 ? 10 : args.k, labels, num_classes,
                    flags.deterministic ? 1 : flags.threads);
    GnnTrainConfig cfg = args.gnn;
    cfg.seed = args.seed;
    const GnnTrainResult trained = train_gnn(graph, subset_table, cfg);
    if (!args.save_model.empty()) {
      save_gcn_model(args.save_model, trained.model,
                     {{"best_epoch", std::to_string(trained.best_epoch)},
                      {"graph_k", std::to_string(args.k == 0 ? 10 : args.k)}});
    }
    const auto predicted = gnn_extrapolate(trained.model, graph);
    const IndexSet residual = subset.complement();
    for (std::int64_t id : residual.indices) {
      extrapolated.rows.push_back({id, predicted[static_cast<std::size_t>(id)],
                                   Provenance::extrapolated_gnn, false});
    }
  }

  const ScoreTable merged =
      merge_scores(subset_table, extrapolated, static_cast<std::int64_t>(n));
  write_score_table(args.out, merged);

  RunManifest manifest(std::string("extrapolate ") + extrapolator_kind_name(kind));
  manifest.set_seed(args.seed);
  manifest.add_config("embeddings", args.embeddings);
  manifest.add_config("subset_scores", args.scores);
  manifest.add_config("k", std::to_string(args.k));
  manifest.add_output(args.out);
  manifest.write(args.out + ".manifest", !flags.deterministic);
}

// ----------------------------------------------------------------- prune ---

struct PruneArgs {
  std::string scores, out;
  double rate = 0.5;
  bool invert = false;
};

void run_prune(const PruneArgs& args, const GlobalFlags& flags) {
  const ScoreTable table = read_score_table(args.scores);
  const IndexSet kept = select_top(table, args.rate, args.invert);
  write_index_set(args.out, kept);

  RunManifest manifest("prune");
  manifest.add_config("scores", args.scores);
  manifest.add_config("rate", format_score(args.rate));
  manifest.add_config("invert", args.invert ? "true" : "false");
  manifest.add_output(args.out);
  manifest.write(args.out + ".manifest", !flags.deterministic);
}

// ------------------------------------------------------------------ eval ---

std::vector<double> table_scores(const ScoreTable& table) { return table.scores(); }

void run_eval_corr(const std::string& a_path, const std::string& b_path,
                   const std::string& scope, const std::string& out) {
  const ScoreTable a = read_score_table(a_path);
  const ScoreTable b = read_score_table(b_path);
  require(a.size() == b.size(), ErrorCode::LengthMismatch,
          "score tables differ in row count");
  std::vector<double> va, vb;
  if (scope == "residual") {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (b.rows[i].in_subset) continue;
      va.push_back(a.rows[i].score);
      vb.push_back(b.rows[i].score);
    }
  } else {
    va = table_scores(a);
    vb = table_scores(b);
  }
  const CorrelationReport report = correlation_report(va, vb, scope);
  std::printf("pearson %s\nspearman %s\nn_pairs %zu\nscope %s\n",
              format_score(report.pearson).c_str(), format_score(report.spearman).c_str(),
              report.n_pairs, report.scope.c_str());
  if (!out.empty()) {
    std::string csv = "pearson,spearman,n_pairs,scope\n";
    csv += format_score(report.pearson) + "," + format_score(report.spearman) + "," +
           std::to_string(report.n_pairs) + "," + report.scope + "\n";
    atomic_write(out, csv);
  }
}

void run_eval_ranks(const std::string& gt_path, const std::string& pred_path,
                    std::size_t top_m, const std::string& out) {
  const ScoreTable gt = read_score_table(gt_path);
  const ScoreTable pred = read_score_table(pred_path);
  require(gt.size() == pred.size(), ErrorCode::LengthMismatch,
          "score tables differ in row count");
  const RankDiffReport report = rank_report(gt.scores(), pred.scores(), top_m);
  atomic_write(out, encode_rank_report_csv(report));
}

void run_eval_hist(const std::string& scores_path, std::size_t bins, const std::string& out) {
  const ScoreTable table = read_score_table(scores_path);
  atomic_write(out, encode_histogram_csv(score_histogram(table.scores(), bins)));
}

// -------------------------------------------------------------- pipeline ---

PipelineConfig pipeline_config_from_file(const std::string& path) {
  const KeyValueConfig file = KeyValueConfig::parse_file(path);
  PipelineConfig cfg;
  cfg.embeddings_path = file.get_string("pipeline.embeddings", "");
  cfg.trajectory_path = file.get_string("pipeline.trajectory", "");
  cfg.labels_path = file.get_string("pipeline.labels", "");
  cfg.ground_truth_path = file.get_string("pipeline.ground_truth", "");
  cfg.subset_path = file.get_string("pipeline.subset", "");
  cfg.scorer = scorer_kind_from_name(file.get_string("pipeline.scorer", "du"));
  cfg.extrapolator =
      extrapolator_kind_from_name(file.get_string("pipeline.extrapolator", "knn"));
  cfg.subset_fraction = file.get_double("pipeline.subset_fraction", cfg.subset_fraction);
  cfg.knn_k = static_cast<std::size_t>(file.get_int("pipeline.knn_k", 20));
  cfg.knn_normalize = file.get_bool("pipeline.knn_normalize", false);
  cfg.graph_k = static_cast<std::size_t>(file.get_int("pipeline.graph_k", 10));
  cfg.prune_rates = file.get_double_list("pipeline.prune_rates", cfg.prune_rates);
  cfg.invert = file.get_bool("pipeline.invert", false);
  cfg.scorer_cfg.window = static_cast<int>(file.get_int("pipeline.window", 10));
  cfg.scorer_cfg.beta = file.get_double("pipeline.beta", 0.9);
  cfg.gnn.epochs = static_cast<int>(file.get_int("gnn.epochs", cfg.gnn.epochs));
  cfg.gnn.batch_nodes =
      static_cast<std::size_t>(file.get_int("gnn.batch_nodes", cfg.gnn.batch_nodes));
  cfg.gnn.fanout = static_cast<std::size_t>(file.get_int("gnn.fanout", cfg.gnn.fanout));
  cfg.gnn.neighbor_sampling = file.get_bool("gnn.neighbor_sampling", true);
  cfg.gnn.val_fraction = file.get_double("gnn.val_fraction", cfg.gnn.val_fraction);
  cfg.gnn.learning_rate = file.get_double("gnn.learning_rate", cfg.gnn.learning_rate);
  cfg.gnn.dropout = file.get_double("gnn.dropout", cfg.gnn.dropout);
  cfg.gnn.hidden1 = static_cast<std::size_t>(file.get_int("gnn.hidden1", cfg.gnn.hidden1));
  cfg.gnn.hidden2 = static_cast<std::size_t>(file.get_int("gnn.hidden2", cfg.gnn.hidden2));
  cfg.gnn.hidden3 = static_cast<std::size_t>(file.get_int("gnn.hidden3", cfg.gnn.hidden3));
  return cfg;
}

void manifest_pipeline_config(RunManifest& manifest, const PipelineConfig& cfg) {
  manifest.add_config("scorer", scorer_kind_name(cfg.scorer));
  manifest.add_config("extrapolator", extrapolator_kind_name(cfg.extrapolator));
  manifest.add_config("subset_fraction", format_score(cfg.subset_fraction));
  manifest.add_config("knn_k", std::to_string(cfg.knn_k));
  manifest.add_config("graph_k", std::to_string(cfg.graph_k));
  manifest.add_config("window", std::to_string(cfg.scorer_cfg.window));
  manifest.add_config("beta", format_score(cfg.scorer_cfg.beta));
  manifest.add_config("invert", cfg.invert ? "true" : "false");
  manifest.add_config("deterministic", cfg.deterministic ? "true" : "false");
  std::string rates;
  for (double r : cfg.prune_rates) {
    if (!rates.empty()) rates += ",";
    rates += format_score(r);
  }
  manifest.add_config("prune_rates", rates);
  manifest.add_config("gnn.epochs", std::to_string(cfg.gnn.epochs));
  manifest.add_config("gnn.batch_nodes", std::to_string(cfg.gnn.batch_nodes));
  manifest.add_config("gnn.fanout", std::to_string(cfg.gnn.fanout));
  manifest.add_config("gnn.hidden",
                      std::to_string(cfg.gnn.hidden1) + "," + std::to_string(cfg.gnn.hidden2) +
                          "," + std::to_string(cfg.gnn.hidden3));
}

std::string rate_file_name(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "kept_p%02d.idx", static_cast<int>(std::lround(rate * 100)));
  return buf;
}

void run_pipeline_cmd(PipelineConfig cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const PruneResult result = run_pipeline(cfg);

  RunManifest manifest("pipeline");
  manifest.set_seed(cfg.seed);
  manifest.add_config("embeddings", cfg.embeddings_path);
  manifest.add_config("trajectory", cfg.trajectory_path);
  manifest_pipeline_config(manifest, cfg);

  const fs::path dir(out_dir);
  write_score_table(dir / "scores.csv", result.merged);
  manifest.add_output(dir / "scores.csv");
  write_index_set(dir / "subset.idx", result.subset);
  manifest.add_output(dir / "subset.idx");
  for (const auto& [rate, kept] : result.kept) {
    const fs::path path = dir / rate_file_name(rate);
    write_index_set(path, kept);
    manifest.add_output(path);
  }
  if (result.correlation) {
    std::string csv = "pearson,spearman,n_pairs,scope\n";
    csv += format_score(result.correlation->pearson) + "," +
           format_score(result.correlation->spearman) + "," +
           std::to_string(result.correlation->n_pairs) + "," + result.correlation->scope + "\n";
    atomic_write(dir / "correlation.csv", csv);
    manifest.add_output(dir / "correlation.csv");
  }
  manifest.add_timings(result.timings);
  emit_timings(result.timings);
  manifest.write(dir / "manifest.txt", !cfg.deterministic);
}

// ----------------------------------------------------------------- sweep ---

struct SweepArgs {
  std::string config, out_dir;
  std::uint64_t seed = 0;
};

void run_sweep(const SweepArgs& args, const GlobalFlags& flags) {
  const KeyValueConfig file = KeyValueConfig::parse_file(args.config);
  PipelineConfig base = pipeline_config_from_file(args.config);
  base.deterministic = flags.deterministic;
  base.threads = flags.threads;
  require(!base.ground_truth_path.empty(), ErrorCode::ConfigInvalid,
          "sweep needs pipeline.ground_truth for correlations");

  const auto k_values = file.get_double_list("sweep.k_values", {10, 20, 50, 100});
  const auto fractions = file.get_double_list("sweep.subset_fractions", {0.1, 0.2, 0.25});
  std::vector<std::string> extrapolators;
  {
    std::istringstream in(file.get_string("sweep.extrapolators", "knn,gnn"));
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) extrapolators.push_back(item);
    }
  }

  fs::create_directories(args.out_dir);
  std::string csv = "scorer,extrapolator,subset_fraction,k,pearson,spearman,n_pairs\n";
  RunManifest manifest("sweep");
  manifest.set_seed(args.seed);
  manifest_pipeline_config(manifest, base);

  for (const std::string& extrap : extrapolators) {
    for (double fraction : fractions) {
      for (double k : k_values) {
        PipelineConfig cfg = base;
        cfg.extrapolator = extrapolator_kind_from_name(extrap);
        cfg.subset_fraction = fraction;
        cfg.knn_k = static_cast<std::size_t>(k);
        cfg.graph_k = static_cast<std::size_t>(k);
        // one deterministic stream per sweep cell
        cfg.seed = derive_seed(args.seed,
                               fnv1a64(extrap + "/" + format_score(fraction) + "/" +
                                       format_score(k)));
        const PruneResult result = run_pipeline(cfg);
        require(result.correlation.has_value(), ErrorCode::ConfigInvalid,
                "sweep cell produced no correlation report");
        csv += std::string(scorer_kind_name(cfg.scorer)) + "," + extrap + "," +
               format_score(fraction) + "," + format_score(k) + "," +
               format_score(result.correlation->pearson) + "," +
               format_score(result.correlation->spearman) + "," +
               std::to_string(result.correlation->n_pairs) + "\n";
      }
    }
  }
  const fs::path out = fs::path(args.out_dir) / "sweep.csv";
  atomic_write(out, csv);
  manifest.add_output(out);
  manifest.write(fs::path(args.out_dir) / "manifest.txt", !flags.deterministic);
}

// ----------------------------------------------------------------- synth ---

struct SynthGenArgs {
  std::string out_dir;
  std::int64_t n = 1000;
  int classes = 5;
  int dim = 8;
  double sigma = 1.0;
  double noise = 0.0;
  std::int64_t n_test = 200;
  std::uint64_t seed = 0;
};

void run_synth_gen(const SynthGenArgs& args, const GlobalFlags& flags) {
  BlobDatasetConfig cfg;
  cfg.n = args.n;
  cfg.classes = args.classes;
  cfg.dim = args.dim;
  cfg.sigma = args.sigma;
  cfg.noise_rate = args.noise;
  cfg.n_test = args.n_test;
  cfg.seed = args.seed;
  const BlobDataset ds = gen_blobs(cfg);

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  RunManifest manifest("synth gen");
  manifest.set_seed(args.seed);
  manifest.add_config("n", std::to_string(args.n));
  manifest.add_config("classes", std::to_string(args.classes));
  manifest.add_config("dim", std::to_string(args.dim));
  manifest.add_config("sigma", format_score(args.sigma));
  manifest.add_config("noise", format_score(args.noise));

  auto save = [&](const char* name, const DenseTensor& t) {
    write_tensor(dir / name, t);
    manifest.add_output(dir / name);
  };
  save("x.npy", DenseTensor({static_cast<std::size_t>(cfg.n),
                             static_cast<std::size_t>(cfg.dim)}, ds.x));
  save("labels.npy", labels_to_tensor(ds.labels));
  save("true_labels.npy", labels_to_tensor(ds.true_labels));
  {
    std::vector<float> flags_data;
    flags_data.reserve(ds.noisy.size());
    for (auto v : ds.noisy) flags_data.push_back(static_cast<float>(v));
    save("noisy.npy", DenseTensor({ds.noisy.size()}, std::move(flags_data)));
  }
  save("x_test.npy", DenseTensor({static_cast<std::size_t>(cfg.n_test),
                                  static_cast<std::size_t>(cfg.dim)}, ds.x_test));
  save("y_test.npy", labels_to_tensor(ds.y_test));

  std::string meta = "n=" + std::to_string(cfg.n) + "\nclasses=" + std::to_string(cfg.classes) +
                     "\ndim=" + std::to_string(cfg.dim) + "\nn_test=" +
                     std::to_string(cfg.n_test) + "\nseed=" + std::to_string(cfg.seed) + "\n";
  atomic_write(dir / "meta.txt", meta);
  manifest.add_output(dir / "meta.txt");
  manifest.write(dir / "manifest.txt", !flags.deterministic);
}

BlobDataset load_dataset(const std::string& data_dir) {
  const fs::path dir(data_dir);
  const KeyValueConfig meta = KeyValueConfig::parse_file(dir / "meta.txt");
  BlobDataset ds;
  ds.cfg.n = meta.get_int("n", 0);
  ds.cfg.classes = static_cast<int>(meta.get_int("classes", 0));
  ds.cfg.dim = static_cast<int>(meta.get_int("dim", 0));
  ds.cfg.n_test = meta.get_int("n_test", 0);
  ds.cfg.seed = static_cast<std::uint64_t>(meta.get_int("seed", 0));
  ds.x = read_tensor(dir / "x.npy").data;
  ds.labels = tensor_to_labels(read_tensor(dir / "labels.npy"));
  ds.true_labels = tensor_to_labels(read_tensor(dir / "true_labels.npy"));
  const DenseTensor noisy = read_tensor(dir / "noisy.npy");
  ds.noisy.assign(noisy.data.begin(), noisy.data.end());
  ds.x_test = read_tensor(dir / "x_test.npy").data;
  ds.y_test = tensor_to_labels(read_tensor(dir / "y_test.npy"));
  require(ds.labels.size() == static_cast<std::size_t>(ds.cfg.n), ErrorCode::ShapeMismatch,
          "dataset files inconsistent with meta.txt");
  return ds;
}

struct SynthProbeArgs {
  std::string data_dir, out_dir, train_on;
  int epochs = 30;
  int hidden = 64;
  double lr = 0.1;
  std::size_t batch = 64;
  std::uint64_t seed = 0;
};

void run_synth_probe(const SynthProbeArgs& args, const GlobalFlags& flags) {
  const BlobDataset ds = load_dataset(args.data_dir);
  ProbeConfig cfg;
  cfg.epochs = args.epochs;
  cfg.hidden = args.hidden;
  cfg.learning_rate = args.lr;
  cfg.batch = args.batch;
  cfg.seed = args.seed;

  std::vector<std::int32_t> train_on;
  const std::vector<std::int32_t>* train_ptr = nullptr;
  if (!args.train_on.empty()) {
    const IndexSet subset = read_index_set(args.train_on);
    require(subset.universe_size == ds.cfg.n, ErrorCode::ShapeMismatch,
            "training subset universe does not match dataset");
    for (std::int64_t id : subset.indices) train_on.push_back(static_cast<std::int32_t>(id));
    train_ptr = &train_on;
  }
  const ProbeRun run = train_probe(ds, cfg, train_ptr);

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  RunManifest manifest("synth probe");
  manifest.set_seed(args.seed);
  manifest.add_config("data_dir", args.data_dir);
  manifest.add_config("epochs", std::to_string(args.epochs));
  manifest.add_config("hidden", std::to_string(args.hidden));
  manifest.add_config("learning_rate", format_score(args.lr));

  write_tensor(dir / "trajectory.npy", run.trajectory.to_tensor());
  manifest.add_output(dir / "trajectory.npy");
  write_tensor(dir / "embeddings.npy",
               DenseTensor({run.trajectory.samples, static_cast<std::size_t>(args.hidden)},
                           run.embeddings));
  manifest.add_output(dir / "embeddings.npy");
  {
    std::vector<float> acc;
    acc.reserve(run.test_accuracy.size());
    for (double v : run.test_accuracy) acc.push_back(static_cast<float>(v));
    write_tensor(dir / "test_accuracy.npy", DenseTensor({acc.size()}, std::move(acc)));
    manifest.add_output(dir / "test_accuracy.npy");
  }
  {
    IndexSet trained;
    trained.universe_size = ds.cfg.n;
    for (auto id : run.train_on) trained.indices.push_back(id);
    write_index_set(dir / "train_on.idx", trained);
    manifest.add_output(dir / "train_on.idx");
  }
  manifest.write(dir / "manifest.txt", !flags.deterministic);
}

struct SynthDownstreamArgs {
  std::string data_dir, kept, out;
  int epochs = 30;
  int hidden = 64;
  double lr = 0.1;
  std::size_t batch = 64;
  std::uint64_t seed = 0;
};

void run_synth_downstream(const SynthDownstreamArgs& args) {
  const BlobDataset ds = load_dataset(args.data_dir);
  ProbeConfig cfg;
  cfg.epochs = args.epochs;
  cfg.hidden = args.hidden;
  cfg.learning_rate = args.lr;
  cfg.batch = args.batch;
  cfg.seed = args.seed;
  const double accuracy = eval_downstream(ds, read_index_set(args.kept), cfg);
  std::printf("test_accuracy %s\n", format_score(accuracy).c_str());
  if (!args.out.empty()) {
    atomic_write(args.out, "test_accuracy=" + format_score(accuracy) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"importance-score extrapolation and data-pruning toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--threads", flags.threads, "worker threads for parallel stages");
  app.add_flag("--deterministic", flags.deterministic,
               "single-threaded reductions, timing-free manifests");

  // score
  auto* score = app.add_subcommand("score", "compute importance scores from trajectories");
  score->require_subcommand(1);
  ScoreArgs score_args;
  ScorerKind score_kind = ScorerKind::du;
  for (const auto& [name, kind] :
       std::vector<std::pair<std::string, ScorerKind>>{{"du", ScorerKind::du},
                                                       {"tdds", ScorerKind::tdds},
                                                       {"unsup-du", ScorerKind::unsupervised_du}}) {
    auto* sub = score->add_subcommand(name, std::string("score with ") + name);
    sub->add_option("--traj", score_args.traj, "trajectory tensor")->required();
    sub->add_option("--out", score_args.out, "output score table")->required();
    sub->add_option("--labels", score_args.labels, "labels tensor (du over (E,n,C))");
    sub->add_option("--subset", score_args.subset, "restrict output to an index set");
    sub->add_option("--window", score_args.window, "sliding window J");
    if (kind == ScorerKind::tdds) {
      sub->add_option("--beta", score_args.beta, "exponential decay");
    }
    sub->callback([&, kind = kind] { run_score(kind, score_args, flags); });
  }

  // extrapolate
  auto* extrapolate = app.add_subcommand("extrapolate", "extrapolate subset scores");
  extrapolate->require_subcommand(1);
  ExtrapolateArgs ex_args;
  {
    auto* knn = extrapolate->add_subcommand("knn", "exp-weighted k-nearest-neighbor average");
    knn->add_option("--embeddings", ex_args.embeddings, "embedding tensor (n, d')")->required();
    knn->add_option("--scores", ex_args.scores, "subset score table")->required();
    knn->add_option("--out", ex_args.out, "merged output score table")->required();
    knn->add_option("--k", ex_args.k, "neighbor count (default 20)");
    knn->add_flag("--normalize", ex_args.normalize, "unit-normalize embeddings first");
    knn->callback([&] { run_extrapolate(ExtrapolatorKind::knn, ex_args, flags); });

    auto* gnn = extrapolate->add_subcommand("gnn", "graph-convolution regressor");
    gnn->add_option("--embeddings", ex_args.embeddings, "embedding tensor (n, d')")->required();
    gnn->add_option("--scores", ex_args.scores, "subset score table")->required();
    gnn->add_option("--out", ex_args.out, "merged output score table")->required();
    gnn->add_option("--k", ex_args.k, "graph neighbor count (default 10)");
    gnn->add_option("--labels", ex_args.labels, "labels for one-hot node features");
    gnn->add_option("--seed", ex_args.seed, "rng seed")->required();
    gnn->add_option("--save-model", ex_args.save_model, "checkpoint bundle directory");
    gnn->add_option("--epochs", ex_args.gnn.epochs, "training epochs");
    gnn->add_option("--batch-nodes", ex_args.gnn.batch_nodes, "mini-batch node count");
    gnn->add_option("--fanout", ex_args.gnn.fanout, "sampled neighbors per hop");
    gnn->add_option("--hidden1", ex_args.gnn.hidden1, "first hidden width");
    gnn->add_option("--hidden2", ex_args.gnn.hidden2, "second hidden width");
    gnn->add_option("--hidden3", ex_args.gnn.hidden3, "third hidden width");
    gnn->callback([&] { run_extrapolate(ExtrapolatorKind::gnn, ex_args, flags); });
  }

  // prune
  auto* prune = app.add_subcommand("prune", "keep the top-scoring samples");
  PruneArgs prune_args;
  prune->add_option("--scores", prune_args.scores, "score table")->required();
  prune->add_option("--rate", prune_args.rate, "prune rate in (0,1)")->required();
  prune->add_option("--out", prune_args.out, "output index set")->required();
  prune->add_flag("--invert", prune_args.invert, "keep lowest-scoring instead");
  prune->callback([&] { run_prune(prune_args, flags); });

  // eval
  auto* eval = app.add_subcommand("eval", "correlation and diagnostic reports");
  eval->require_subcommand(1);
  std::string eval_a, eval_b, eval_scope = "all", eval_out;
  std::size_t eval_top_m = 10, eval_bins = 20;
  {
    auto* corr = eval->add_subcommand("corr", "Pearson and Spearman correlation");
    corr->add_option("--a", eval_a, "score table A")->required();
    corr->add_option("--b", eval_b, "score table B")->required();
    corr->add_option("--scope", eval_scope, "all|residual (residual uses B's in_subset)");
    corr->add_option("--out", eval_out, "optional CSV output");
    corr->callback([&] { run_eval_corr(eval_a, eval_b, eval_scope, eval_out); });

    auto* ranks = eval->add_subcommand("ranks", "rank-difference report");
    ranks->add_option("--gt", eval_a, "ground-truth score table")->required();
    ranks->add_option("--pred", eval_b, "predicted score table")->required();
    ranks->add_option("--top-m", eval_top_m, "extreme samples per side");
    ranks->add_option("--out", eval_out, "output CSV")->required();
    ranks->callback([&] { run_eval_ranks(eval_a, eval_b, eval_top_m, eval_out); });

    auto* hist = eval->add_subcommand("hist", "score distribution histogram");
    hist->add_option("--scores", eval_a, "score table")->required();
    hist->add_option("--bins", eval_bins, "bin count");
    hist->add_option("--out", eval_out, "output CSV")->required();
    hist->callback([&] { run_eval_hist(eval_a, eval_bins, eval_out); });
  }

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "run stages I-V end to end");
  std::string pipeline_config_path, pipeline_out_dir = "pipeline_out";
  std::uint64_t pipeline_seed = 0;
  pipeline->add_option("--config", pipeline_config_path, "key=value config file")->required();
  pipeline->add_option("--seed", pipeline_seed, "rng seed")->required();
  pipeline->add_option("--out-dir", pipeline_out_dir, "output directory");
  pipeline->callback([&] {
    PipelineConfig cfg = pipeline_config_from_file(pipeline_config_path);
    cfg.seed = pipeline_seed;
    cfg.deterministic = flags.deterministic;
    cfg.threads = flags.threads;
    run_pipeline_cmd(cfg, pipeline_out_dir);
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "cross-product correlation sweep");
  SweepArgs sweep_args;
  sweep->add_option("--config", sweep_args.config, "key=value config file")->required();
  sweep->add_option("--seed", sweep_args.seed, "rng seed")->required();
  sweep->add_option("--out-dir", sweep_args.out_dir, "output directory")->required();
  sweep->callback([&] { run_sweep(sweep_args, flags); });

  // synth
  auto* synth = app.add_subcommand("synth", "synthetic experiment harness");
  synth->require_subcommand(1);
  SynthGenArgs gen_args;
  SynthProbeArgs probe_args;
  SynthDownstreamArgs down_args;
  {
    auto* gen = synth->add_subcommand("gen", "generate a blob classification dataset");
    gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();
    gen->add_option("--n", gen_args.n, "training samples");
    gen->add_option("--classes", gen_args.classes, "class count");
    gen->add_option("--dim", gen_args.dim, "input dimension");
    gen->add_option("--sigma", gen_args.sigma, "cluster spread");
    gen->add_option("--noise", gen_args.noise, "label noise fraction");
    gen->add_option("--n-test", gen_args.n_test, "test samples");
    gen->add_option("--seed", gen_args.seed, "rng seed")->required();
    gen->callback([&] { run_synth_gen(gen_args, flags); });

    auto* probe = synth->add_subcommand("probe", "train the probe and log trajectories");
    probe->add_option("--data-dir", probe_args.data_dir, "dataset directory")->required();
    probe->add_option("--out-dir", probe_args.out_dir, "output directory")->required();
    probe->add_option("--train-on", probe_args.train_on, "index set to train on");
    probe->add_option("--epochs", probe_args.epochs, "training epochs");
    probe->add_option("--hidden", probe_args.hidden, "hidden width");
    probe->add_option("--lr", probe_args.lr, "learning rate");
    probe->add_option("--batch", probe_args.batch, "batch size");
    probe->add_option("--seed", probe_args.seed, "rng seed")->required();
    probe->callback([&] { run_synth_probe(probe_args, flags); });

    auto* down = synth->add_subcommand("downstream", "train on a kept set, report accuracy");
    down->add_option("--data-dir", down_args.data_dir, "dataset directory")->required();
    down->add_option("--kept", down_args.kept, "kept index set")->required();
    down->add_option("--out", down_args.out, "optional output file");
    down->add_option("--epochs", down_args.epochs, "training epochs");
    down->add_option("--hidden", down_args.hidden, "hidden width");
    down->add_option("--lr", down_args.lr, "learning rate");
    down->add_option("--batch", down_args.batch, "batch size");
    down->add_option("--seed", down_args.seed, "rng seed")->required();
    down->callback([&] { run_synth_downstream(down_args); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 0;
}
