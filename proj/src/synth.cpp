#include "scorex/synth.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "scorex/gcn.hpp"
#include "scorex/rng.hpp"

namespace scorex {

void BlobDatasetConfig::validate() const {
  require(classes >= 2, ErrorCode::ConfigInvalid, "need at least 2 classes");
  require(n >= classes, ErrorCode::ConfigInvalid, "need at least one sample per class");
  require(dim >= 1, ErrorCode::ConfigInvalid, "dimension must be positive");
  require(sigma >= 0.0, ErrorCode::ConfigInvalid, "sigma must be non-negative");
  require(noise_rate >= 0.0 && noise_rate < 1.0, ErrorCode::ConfigInvalid,
          "noise rate must lie in [0,1)");
  require(n_test >= 0, ErrorCode::ConfigInvalid, "n_test must be non-negative");
}

BlobDataset gen_blobs(const BlobDatasetConfig& cfg) {
  cfg.validate();
  BlobDataset ds;
  ds.cfg = cfg;

  Rng rng_means(derive_seed(cfg.seed, 0x3e));
  Rng rng_points(derive_seed(cfg.seed, 0x9d));
  Rng rng_noise(derive_seed(cfg.seed, 0x4c));

  const std::size_t d = static_cast<std::size_t>(cfg.dim);
  std::vector<double> means(static_cast<std::size_t>(cfg.classes) * d);
  for (double& v : means) v = rng_means.uniform(0.0, cfg.box);

  auto draw = [&](std::vector<float>& xs, std::vector<std::int32_t>& ys, std::int64_t count) {
    xs.resize(static_cast<std::size_t>(count) * d);
    ys.resize(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      const std::int32_t c = static_cast<std::int32_t>(i % cfg.classes);
      ys[static_cast<std::size_t>(i)] = c;
      for (std::size_t j = 0; j < d; ++j) {
        const double v = means[static_cast<std::size_t>(c) * d + j] +
                         cfg.sigma * rng_points.normal();
        xs[static_cast<std::size_t>(i) * d + j] = static_cast<float>(v);
      }
    }
  };
  draw(ds.x, ds.true_labels, cfg.n);
  draw(ds.x_test, ds.y_test, cfg.n_test);

  ds.labels = ds.true_labels;
  ds.noisy.assign(static_cast<std::size_t>(cfg.n), 0);
  const std::int64_t n_noisy =
      static_cast<std::int64_t>(std::floor(cfg.noise_rate * static_cast<double>(cfg.n) + 0.5));
  for (std::int64_t id : rng_noise.sample_without_replacement(cfg.n, n_noisy)) {
    ds.labels[static_cast<std::size_t>(id)] =
        static_cast<std::int32_t>(rng_noise.below(static_cast<std::uint64_t>(cfg.classes)));
    ds.noisy[static_cast<std::size_t>(id)] = 1;
  }
  return ds;
}

namespace {

struct ProbeNet {
  RowMat w1;           // dim x hidden
  Eigen::VectorXd b1;  // hidden
  RowMat w2;           // hidden x classes
  Eigen::VectorXd b2;  // classes

  static ProbeNet init(std::size_t dim, std::size_t hidden, std::size_t classes, Rng& rng) {
    ProbeNet net;
    auto glorot = [&rng](std::size_t rows, std::size_t cols) {
      RowMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
      return m;
    };
    net.w1 = glorot(dim, hidden);
    net.b1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden));
    net.w2 = glorot(hidden, classes);
    net.b2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes));
    return net;
  }

  RowMat hidden(const RowMat& x) const {
    return ((x * w1).rowwise() + b1.transpose()).cwiseMax(0.0);
  }

  RowMat softmax(const RowMat& x) const {
    RowMat logits = (hidden(x) * w2).rowwise() + b2.transpose();
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      const double mx = logits.row(r).maxCoeff();
      logits.row(r) = (logits.row(r).array() - mx).exp();
      logits.row(r) /= logits.row(r).sum();
    }
    return logits;
  }
};

RowMat rows_to_matrix(const std::vector<float>& data, std::size_t dim,
                      std::span<const std::int32_t> rows) {
  RowMat out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const float* src = data.data() + static_cast<std::size_t>(rows[i]) * dim;
    for (std::size_t c = 0; c < dim; ++c) out(static_cast<Eigen::Index>(i), c) = src[c];
  }
  return out;
}

}  // namespace

ProbeRun train_probe(const BlobDataset& dataset, const ProbeConfig& cfg,
                     const std::vector<std::int32_t>* train_on) {
  require(cfg.epochs >= 1, ErrorCode::ConfigInvalid, "epochs must be at least 1");
  require(cfg.hidden >= 1, ErrorCode::ConfigInvalid, "hidden width must be positive");
  require(cfg.batch >= 1, ErrorCode::ConfigInvalid, "batch size must be positive");

  const std::size_t n = dataset.labels.size();
  const std::size_t d = static_cast<std::size_t>(dataset.cfg.dim);
  const std::size_t h = static_cast<std::size_t>(cfg.hidden);
  const std::size_t classes = static_cast<std::size_t>(dataset.cfg.classes);

  // standardize inputs with whole-training-set statistics; keeps the probe
  // stable regardless of where the cluster box sits
  std::vector<float> x_std(dataset.x.size());
  std::vector<float> x_test_std(dataset.x_test.size());
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = dataset.x[i * d + c];
      mean += v;
      sq += v * v;
    }
    mean /= static_cast<double>(n);
    const double var = std::max(sq / static_cast<double>(n) - mean * mean, 0.0);
    const double inv = 1.0 / (std::sqrt(var) + 1e-8);
    for (std::size_t i = 0; i < n; ++i) {
      x_std[i * d + c] = static_cast<float>((dataset.x[i * d + c] - mean) * inv);
    }
    for (std::size_t i = 0; i < dataset.y_test.size(); ++i) {
      x_test_std[i * d + c] = static_cast<float>((dataset.x_test[i * d + c] - mean) * inv);
    }
  }

  ProbeRun run;
  if (train_on) {
    run.train_on = *train_on;
    require(!run.train_on.empty(), ErrorCode::EmptyKeptSet, "training set is empty");
    for (std::int32_t id : run.train_on) {
      require(id >= 0 && static_cast<std::size_t>(id) < n, ErrorCode::ShapeMismatch,
              "training index outside dataset");
    }
  } else {
    run.train_on.resize(n);
    std::iota(run.train_on.begin(), run.train_on.end(), 0);
  }

  Rng rng_init(derive_seed(cfg.seed, 0x21));
  Rng rng_batch(derive_seed(cfg.seed, 0x8c));
  ProbeNet net = ProbeNet::init(d, h, classes, rng_init);

  std::vector<std::int32_t> all_ids(n);
  std::iota(all_ids.begin(), all_ids.end(), 0);
  const RowMat x_all = rows_to_matrix(x_std, d, all_ids);

  std::vector<std::int32_t> test_ids(dataset.y_test.size());
  std::iota(test_ids.begin(), test_ids.end(), 0);
  const RowMat x_test = rows_to_matrix(x_test_std, d, test_ids);

  run.trajectory.epochs = static_cast<std::size_t>(cfg.epochs);
  run.trajectory.samples = n;
  run.trajectory.classes = classes;
  run.trajectory.values.resize(static_cast<std::size_t>(cfg.epochs) * n * classes);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::int32_t> order = run.train_on;
    rng_batch.shuffle(order);

    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch);
      std::span<const std::int32_t> batch(order.data() + start, stop - start);
      const RowMat x = rows_to_matrix(x_std, d, batch);

      const RowMat z1 = (x * net.w1).rowwise() + net.b1.transpose();
      const RowMat hidden = z1.cwiseMax(0.0);
      RowMat probs = (hidden * net.w2).rowwise() + net.b2.transpose();
      for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        const double mx = probs.row(r).maxCoeff();
        probs.row(r) = (probs.row(r).array() - mx).exp();
        probs.row(r) /= probs.row(r).sum();
      }

      // d(cross entropy)/d(logits) = (softmax - onehot) / batch
      RowMat grad = probs;
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        grad(static_cast<Eigen::Index>(i),
             dataset.labels[static_cast<std::size_t>(batch[i])]) -= 1.0;
      }
      grad *= inv;

      const RowMat dw2 = hidden.transpose() * grad;
      const Eigen::VectorXd db2 = grad.colwise().sum().transpose();
      RowMat dhidden = grad * net.w2.transpose();
      dhidden = dhidden.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
      const RowMat dw1 = x.transpose() * dhidden;
      const Eigen::VectorXd db1 = dhidden.colwise().sum().transpose();

      net.w2 -= cfg.learning_rate * dw2;
      net.b2 -= cfg.learning_rate * db2;
      net.w1 -= cfg.learning_rate * dw1;
      net.b1 -= cfg.learning_rate * db1;
    }

    // record softmax outputs for every sample, trained on or not
    const RowMat probs_all = net.softmax(x_all);
    float* dst = run.trajectory.values.data() + static_cast<std::size_t>(epoch) * n * classes;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < classes; ++c) {
        dst[i * classes + c] =
            static_cast<float>(probs_all(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(c)));
      }
    }

    if (x_test.rows() > 0) {
      const RowMat probs_test = net.softmax(x_test);
      std::size_t correct = 0;
      for (Eigen::Index r = 0; r < probs_test.rows(); ++r) {
        Eigen::Index best = 0;
        probs_test.row(r).maxCoeff(&best);
        if (static_cast<std::int32_t>(best) == dataset.y_test[static_cast<std::size_t>(r)]) {
          ++correct;
        }
      }
      run.test_accuracy.push_back(static_cast<double>(correct) /
                                  static_cast<double>(probs_test.rows()));
    } else {
      run.test_accuracy.push_back(0.0);
    }
  }

  // final hidden activations become the embedding space
  const RowMat hidden_all = net.hidden(x_all);
  run.embeddings.resize(n * h);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < h; ++c) {
      run.embeddings[i * h + c] = static_cast<float>(
          hidden_all(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
    }
  }
  return run;
}

double eval_downstream(const BlobDataset& dataset, const IndexSet& kept,
                       const ProbeConfig& cfg) {
  require(kept.size() >= 1, ErrorCode::EmptyKeptSet, "kept set is empty");
  kept.validate();
  std::vector<std::int32_t> train_on;
  train_on.reserve(kept.size());
  for (std::int64_t id : kept.indices) train_on.push_back(static_cast<std::int32_t>(id));
  const ProbeRun run = train_probe(dataset, cfg, &train_on);
  return run.test_accuracy.back();
}

}  // namespace scorex
