#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scorex/gcn.hpp"
#include "scorex/knn.hpp"
#include "scorex/manifest.hpp"
#include "scorex/metrics.hpp"
#include "scorex/pipeline.hpp"
#include "scorex/scorers.hpp"
#include "scorex/synth.hpp"
#include "scorex/tensor_io.hpp"

namespace py = pybind11;
using namespace scorex;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>;

std::vector<float> to_floats(const FloatArray& a) {
  return {a.data(), a.data() + a.size()};
}

std::vector<double> to_doubles(const DoubleArray& a) {
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> doubles_out(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ProbTrajectory prob_trajectory(const FloatArray& traj) {
  if (traj.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "expected (E, n) array");
  return ProbTrajectory(static_cast<std::size_t>(traj.shape(0)),
                        static_cast<std::size_t>(traj.shape(1)), to_floats(traj));
}

DistTrajectory dist_trajectory(const FloatArray& traj) {
  if (traj.ndim() != 3) throw Error(ErrorCode::ShapeMismatch, "expected (E, n, C) array");
  return DistTrajectory(static_cast<std::size_t>(traj.shape(0)),
                        static_cast<std::size_t>(traj.shape(1)),
                        static_cast<std::size_t>(traj.shape(2)), to_floats(traj));
}

BlobDataset dataset_from_arrays(const FloatArray& x, const IntArray& labels,
                                const FloatArray& x_test, const IntArray& y_test,
                                int classes) {
  if (x.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "x must be (n, dim)");
  BlobDataset ds;
  ds.cfg.n = static_cast<std::int64_t>(x.shape(0));
  ds.cfg.dim = static_cast<int>(x.shape(1));
  ds.cfg.classes = classes;
  ds.cfg.n_test = static_cast<std::int64_t>(x_test.ndim() == 2 ? x_test.shape(0) : 0);
  ds.x = to_floats(x);
  ds.labels.assign(labels.data(), labels.data() + labels.size());
  ds.true_labels = ds.labels;
  ds.noisy.assign(ds.labels.size(), 0);
  ds.x_test = to_floats(x_test);
  ds.y_test.assign(y_test.data(), y_test.data() + y_test.size());
  return ds;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "importance-score extrapolation core: trajectory scorers, KNN/GNN "
            "extrapolators, correlation metrics and the pruning pipeline";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "ScorexError");

  // scorers
  m.def("du_window_std",
        [](const FloatArray& window) { return du_window_std(to_floats(window)); },
        py::arg("window_probs"),
        "Sample standard deviation (divisor J-1) of one probability window.");

  m.def("du_score",
        [](const FloatArray& traj, int window, int threads) {
          ScorerConfig cfg;
          cfg.window = window;
          cfg.threads = threads;
          return doubles_out(du_score(prob_trajectory(traj), cfg));
        },
        py::arg("prob_trajectory"), py::arg("window") = 10, py::arg("threads") = 1,
        "Dynamic Uncertainty over a (E, n) true-class probability trajectory.");

  m.def("pseudo_labels",
        [](const FloatArray& dists) {
          if (dists.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "expected (n, C)");
          const auto labels =
              pseudo_labels(to_floats(dists), static_cast<std::size_t>(dists.shape(0)),
                            static_cast<std::size_t>(dists.shape(1)));
          py::array_t<std::int32_t> out(static_cast<py::ssize_t>(labels.size()));
          std::copy(labels.begin(), labels.end(), out.mutable_data());
          return out;
        },
        py::arg("final_epoch"), "Argmax class per sample, ties to the lowest index.");

  m.def("unsupervised_du",
        [](const FloatArray& traj, int window, int threads) {
          ScorerConfig cfg;
          cfg.window = window;
          cfg.threads = threads;
          return doubles_out(unsupervised_du(dist_trajectory(traj), cfg));
        },
        py::arg("dist_trajectory"), py::arg("window") = 10, py::arg("threads") = 1,
        "DU over the pseudo-label column of a (E, n, C) trajectory.");

  m.def("tdds_delta",
        [](const FloatArray& prev, const FloatArray& next, double floor_value) {
          return tdds_delta(to_floats(prev), to_floats(next), floor_value);
        },
        py::arg("p_prev"), py::arg("p_next"), py::arg("prob_floor") = 1e-12,
        "Clamped KL divergence between consecutive-epoch predictions.");

  m.def("tdds_score",
        [](const FloatArray& traj, int window, double beta, double floor_value, int threads) {
          ScorerConfig cfg;
          cfg.window = window;
          cfg.beta = beta;
          cfg.prob_floor = floor_value;
          cfg.threads = threads;
          return doubles_out(tdds_score(dist_trajectory(traj), cfg));
        },
        py::arg("dist_trajectory"), py::arg("window") = 10, py::arg("beta") = 0.9,
        py::arg("prob_floor") = 1e-12, py::arg("threads") = 1,
        "TDDS over a (E, n, C) trajectory.");

  m.def("select_label_column",
        [](const FloatArray& traj, const IntArray& labels) {
          const DistTrajectory dist = dist_trajectory(traj);
          std::vector<std::int32_t> ids(labels.data(), labels.data() + labels.size());
          const ProbTrajectory probs = select_label_column(dist, ids);
          py::array_t<float> out({static_cast<py::ssize_t>(probs.epochs),
                                  static_cast<py::ssize_t>(probs.samples)});
          std::copy(probs.values.begin(), probs.values.end(), out.mutable_data());
          return out;
        },
        py::arg("dist_trajectory"), py::arg("labels"));

  // knn
  m.def("knn_search",
        [](const FloatArray& points, const FloatArray& queries, std::size_t k,
           std::optional<std::int64_t> exclude_id) {
          if (points.ndim() != 2 || queries.ndim() != 2) {
            throw Error(ErrorCode::ShapeMismatch, "points/queries must be 2-d");
          }
          const std::size_t count = static_cast<std::size_t>(points.shape(0));
          const std::size_t dim = static_cast<std::size_t>(points.shape(1));
          const KnnIndex index = build_index(to_floats(points), count, dim);
          const std::size_t nq = static_cast<std::size_t>(queries.shape(0));
          const auto qdata = to_floats(queries);
          py::list ids, dists;
          for (std::size_t q = 0; q < nq; ++q) {
            const auto result = knn_query(
                index, std::span<const float>(qdata).subspan(q * dim, dim), k, exclude_id);
            py::list row_ids, row_dists;
            for (const auto& nb : result) {
              row_ids.append(nb.id);
              row_dists.append(nb.distance);
            }
            ids.append(row_ids);
            dists.append(row_dists);
          }
          return py::make_tuple(ids, dists);
        },
        py::arg("points"), py::arg("queries"), py::arg("k"),
        py::arg("exclude_id") = std::nullopt,
        "Exact Euclidean k-nearest neighbors; returns (ids, distances).");

  m.def("knn_extrapolate",
        [](const FloatArray& subset, const DoubleArray& scores, const FloatArray& queries,
           std::size_t k, bool normalize, int threads) {
          if (subset.ndim() != 2 || queries.ndim() != 2) {
            throw Error(ErrorCode::ShapeMismatch, "embeddings must be 2-d");
          }
          KnnExtrapolationConfig cfg;
          cfg.k = k;
          cfg.normalize_embeddings = normalize;
          cfg.threads = threads;
          return doubles_out(knn_extrapolate(
              to_floats(subset), static_cast<std::size_t>(subset.shape(0)),
              static_cast<std::size_t>(subset.shape(1)), to_doubles(scores),
              to_floats(queries), static_cast<std::size_t>(queries.shape(0)), cfg));
        },
        py::arg("subset_embeddings"), py::arg("subset_scores"), py::arg("query_embeddings"),
        py::arg("k") = 20, py::arg("normalize") = false, py::arg("threads") = 1,
        "Exp-of-negative-distance weighted neighbor average.");

  // gnn
  m.def("gnn_extrapolate_scores",
        [](const FloatArray& embeddings, const py::array_t<std::int64_t>& subset_ids,
           const DoubleArray& subset_scores, std::optional<IntArray> labels,
           std::size_t graph_k, int epochs, std::size_t batch_nodes, std::size_t fanout,
           std::size_t hidden1, std::size_t hidden2, std::size_t hidden3, double learning_rate,
           double dropout, double val_fraction, std::uint64_t seed) {
          if (embeddings.ndim() != 2) {
            throw Error(ErrorCode::ShapeMismatch, "embeddings must be (n, d')");
          }
          const std::size_t n = static_cast<std::size_t>(embeddings.shape(0));
          const std::size_t dim = static_cast<std::size_t>(embeddings.shape(1));
          std::vector<std::int32_t> label_vec;
          std::size_t num_classes = 0;
          if (labels) {
            label_vec.assign(labels->data(), labels->data() + labels->size());
            for (auto c : label_vec) {
              num_classes = std::max(num_classes, static_cast<std::size_t>(c) + 1);
            }
          }
          const SampleGraph graph =
              build_graph(to_floats(embeddings), n, dim, graph_k, label_vec, num_classes);
          ScoreTable table;
          for (py::ssize_t i = 0; i < subset_ids.size(); ++i) {
            table.rows.push_back({subset_ids.data()[i], subset_scores.data()[i],
                                  Provenance::computed, true});
          }
          table.sort_by_id();
          GnnTrainConfig cfg;
          cfg.epochs = epochs;
          cfg.batch_nodes = batch_nodes;
          cfg.fanout = fanout;
          cfg.hidden1 = hidden1;
          cfg.hidden2 = hidden2;
          cfg.hidden3 = hidden3;
          cfg.learning_rate = learning_rate;
          cfg.dropout = dropout;
          cfg.val_fraction = val_fraction;
          cfg.seed = seed;
          const GnnTrainResult result = train_gnn(graph, table, cfg);
          const std::vector<double> scores = gnn_extrapolate(result.model, graph);

          py::array_t<double> history({static_cast<py::ssize_t>(result.history.size()),
                                       static_cast<py::ssize_t>(2)});
          for (std::size_t e = 0; e < result.history.size(); ++e) {
            history.mutable_data()[2 * e] = result.history[e].train_loss;
            history.mutable_data()[2 * e + 1] = result.history[e].val_pearson;
          }
          py::dict out;
          out["scores"] = doubles_out(scores);
          out["history"] = history;
          out["best_epoch"] = result.best_epoch;
          return out;
        },
        py::arg("embeddings"), py::arg("subset_ids"), py::arg("subset_scores"),
        py::arg("labels") = std::nullopt, py::arg("graph_k") = 10, py::arg("epochs") = 25,
        py::arg("batch_nodes") = 128, py::arg("fanout") = 10, py::arg("hidden1") = 512,
        py::arg("hidden2") = 256, py::arg("hidden3") = 256, py::arg("learning_rate") = 1e-3,
        py::arg("dropout") = 0.5, py::arg("val_fraction") = 0.1, py::arg("seed") = 0,
        "Build the kNN graph, train the graph-convolution regressor and "
        "return inferred scores for every node plus the training history.");

  // metrics
  m.def("pearson",
        [](const DoubleArray& a, const DoubleArray& b) {
          return pearson(to_doubles(a), to_doubles(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("spearman",
        [](const DoubleArray& a, const DoubleArray& b) {
          return spearman(to_doubles(a), to_doubles(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("rank_report",
        [](const DoubleArray& gt, const DoubleArray& pred, std::size_t top_m) {
          const RankDiffReport report = rank_report(to_doubles(gt), to_doubles(pred), top_m);
          py::dict out;
          py::array_t<std::int64_t> diffs(static_cast<py::ssize_t>(report.abs_rank_diff.size()));
          std::copy(report.abs_rank_diff.begin(), report.abs_rank_diff.end(),
                    diffs.mutable_data());
          out["abs_rank_diff"] = diffs;
          out["highest"] = report.highest_discrepancy;
          out["lowest"] = report.lowest_discrepancy;
          return out;
        },
        py::arg("gt_scores"), py::arg("pred_scores"), py::arg("top_m") = 10);
  m.def("score_histogram",
        [](const DoubleArray& scores, std::size_t bins) {
          const Histogram hist = score_histogram(to_doubles(scores), bins);
          return py::make_tuple(hist.edges, hist.counts);
        },
        py::arg("scores"), py::arg("n_bins") = 20);

  // pruning
  m.def("sample_subset",
        [](std::int64_t n, double fraction, std::uint64_t seed) {
          Rng rng(seed);
          const IndexSet set = sample_subset(n, fraction, rng);
          py::array_t<std::int64_t> out(static_cast<py::ssize_t>(set.size()));
          std::copy(set.indices.begin(), set.indices.end(), out.mutable_data());
          return out;
        },
        py::arg("n"), py::arg("fraction"), py::arg("seed"));
  m.def("select_top",
        [](const DoubleArray& scores, double prune_rate, bool invert) {
          ScoreTable table;
          for (py::ssize_t i = 0; i < scores.size(); ++i) {
            table.rows.push_back({static_cast<std::int64_t>(i), scores.data()[i],
                                  Provenance::computed, false});
          }
          const IndexSet kept = select_top(table, prune_rate, invert);
          py::array_t<std::int64_t> out(static_cast<py::ssize_t>(kept.size()));
          std::copy(kept.indices.begin(), kept.indices.end(), out.mutable_data());
          return out;
        },
        py::arg("scores"), py::arg("prune_rate"), py::arg("invert") = false,
        "Ids of the round((1-p)*n) highest-scoring samples, ties by lower id.");

  // tensor io
  m.def("read_tensor",
        [](const std::string& path) {
          const DenseTensor t = read_tensor(path);
          std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
          py::array_t<float> out(shape);
          std::copy(t.data.begin(), t.data.end(), out.mutable_data());
          return out;
        },
        py::arg("path"));
  m.def("write_tensor",
        [](const std::string& path, const FloatArray& array) {
          DenseTensor t;
          for (py::ssize_t d = 0; d < array.ndim(); ++d) {
            t.shape.push_back(static_cast<std::size_t>(array.shape(d)));
          }
          t.data = to_floats(array);
          write_tensor(path, t);
        },
        py::arg("path"), py::arg("array"));

  // synthetic harness
  m.def("gen_blobs",
        [](std::int64_t n, int classes, int dim, double sigma, double noise_rate,
           std::int64_t n_test, std::uint64_t seed) {
          BlobDatasetConfig cfg;
          cfg.n = n;
          cfg.classes = classes;
          cfg.dim = dim;
          cfg.sigma = sigma;
          cfg.noise_rate = noise_rate;
          cfg.n_test = n_test;
          cfg.seed = seed;
          const BlobDataset ds = gen_blobs(cfg);
          py::dict out;
          py::array_t<float> x({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(dim)});
          std::copy(ds.x.begin(), ds.x.end(), x.mutable_data());
          out["x"] = x;
          out["labels"] = ds.labels;
          out["true_labels"] = ds.true_labels;
          out["noisy"] = ds.noisy;
          py::array_t<float> xt({static_cast<py::ssize_t>(n_test),
                                 static_cast<py::ssize_t>(dim)});
          std::copy(ds.x_test.begin(), ds.x_test.end(), xt.mutable_data());
          out["x_test"] = xt;
          out["y_test"] = ds.y_test;
          return out;
        },
        py::arg("n"), py::arg("classes"), py::arg("dim"), py::arg("sigma") = 1.0,
        py::arg("noise_rate") = 0.0, py::arg("n_test") = 200, py::arg("seed") = 0);

  m.def("train_probe",
        [](const FloatArray& x, const IntArray& labels, const FloatArray& x_test,
           const IntArray& y_test, int classes, int epochs, int hidden, double learning_rate,
           std::size_t batch, std::uint64_t seed,
           std::optional<std::vector<std::int32_t>> train_on) {
          const BlobDataset ds = dataset_from_arrays(x, labels, x_test, y_test, classes);
          ProbeConfig cfg;
          cfg.epochs = epochs;
          cfg.hidden = hidden;
          cfg.learning_rate = learning_rate;
          cfg.batch = batch;
          cfg.seed = seed;
          const ProbeRun run = train_probe(ds, cfg, train_on ? &*train_on : nullptr);
          py::dict out;
          py::array_t<float> traj({static_cast<py::ssize_t>(run.trajectory.epochs),
                                   static_cast<py::ssize_t>(run.trajectory.samples),
                                   static_cast<py::ssize_t>(run.trajectory.classes)});
          std::copy(run.trajectory.values.begin(), run.trajectory.values.end(),
                    traj.mutable_data());
          out["trajectory"] = traj;
          py::array_t<float> emb({static_cast<py::ssize_t>(run.trajectory.samples),
                                  static_cast<py::ssize_t>(hidden)});
          std::copy(run.embeddings.begin(), run.embeddings.end(), emb.mutable_data());
          out["embeddings"] = emb;
          out["test_accuracy"] = run.test_accuracy;
          return out;
        },
        py::arg("x"), py::arg("labels"), py::arg("x_test"), py::arg("y_test"),
        py::arg("classes"), py::arg("epochs") = 30, py::arg("hidden") = 64,
        py::arg("learning_rate") = 0.1, py::arg("batch") = 64, py::arg("seed") = 0,
        py::arg("train_on") = std::nullopt,
        "Train the probe classifier and record per-epoch softmax trajectories.");

  m.def("eval_downstream",
        [](const FloatArray& x, const IntArray& labels, const FloatArray& x_test,
           const IntArray& y_test, int classes, const std::vector<std::int64_t>& kept,
           int epochs, int hidden, double learning_rate, std::size_t batch,
           std::uint64_t seed) {
          const BlobDataset ds = dataset_from_arrays(x, labels, x_test, y_test, classes);
          IndexSet set;
          set.universe_size = ds.cfg.n;
          set.indices = kept;
          std::sort(set.indices.begin(), set.indices.end());
          ProbeConfig cfg;
          cfg.epochs = epochs;
          cfg.hidden = hidden;
          cfg.learning_rate = learning_rate;
          cfg.batch = batch;
          cfg.seed = seed;
          return eval_downstream(ds, set, cfg);
        },
        py::arg("x"), py::arg("labels"), py::arg("x_test"), py::arg("y_test"),
        py::arg("classes"), py::arg("kept"), py::arg("epochs") = 30, py::arg("hidden") = 64,
        py::arg("learning_rate") = 0.1, py::arg("batch") = 64, py::arg("seed") = 0,
        "Train a fresh probe on the kept samples; returns test accuracy.");
}
