// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_TRAIN_HPP_
#define EHNET_TRAIN_HPP_

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ehnet/adadelta.hpp"
#include "ehnet/backprop.hpp"
#include "ehnet/common.hpp"
#include "ehnet/loss.hpp"
#include "ehnet/model.hpp"
#include "ehnet/rng.hpp"

namespace ehnet {

template <class S>
struct TrainingPair {
  std::string id;
  Mat<S> noisy;  // d x t
  Mat<S> clean;  // d x t
};

struct TrainConfig {
  Index epochs = 200;
  Index batch_size = 4;
  Index crop_frames = 256;  // training excerpt length; shorter files are padded
  std::uint64_t seed = 1;
  Index patience = 0;   // epochs without validation improvement; 0 = unlimited
  Index val_every = 1;  // validation cadence in epochs
  double rho = 0.95;
  double epsilon = 1e-6;
  LrSchedule schedule;
};

inline void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) {
    throw ConfigError("epochs must be >= 1");
  }
  if (cfg.batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (cfg.crop_frames < 1) {
    throw ConfigError("crop_frames must be >= 1");
  }
  if (cfg.val_every < 1) {
    throw ConfigError("val_every must be >= 1");
  }
}

struct EpochRecord {
  Index epoch = 0;
  Index step = 0;  // cumulative optimizer steps
  double train_loss = 0.0;
  double val_loss = 0.0;
  bool validated = false;
  double lr_multiplier = 1.0;
  long wall_ms = 0;
};

template <class S>
struct TrainResult {
  ModelParams<S> best;
  double best_val = 0.0;
  Index best_epoch = -1;
  std::vector<EpochRecord> log;
};

namespace detail {

// Seeded crop (or right zero-padding) to exactly `frames` columns.
// Returns the number of valid frames.
template <class S>
Index crop_or_pad(const Mat<S>& x, const Mat<S>& y, Index frames, CounterRng& rng,
                  Mat<S>* x_out, Mat<S>* y_out) {
  const Index t = x.cols();
  if (t >= frames) {
    const Index max_off = t - frames;
    const Index off = max_off > 0 ? static_cast<Index>(rng.next_below(
                                        static_cast<std::uint64_t>(max_off + 1)))
                                  : 0;
    *x_out = x.block(0, off, x.rows(), frames);
    *y_out = y.block(0, off, y.rows(), frames);
    return frames;
  }
  *x_out = Mat<S>::Zero(x.rows(), frames);
  *y_out = Mat<S>::Zero(y.rows(), frames);
  x_out->block(0, 0, x.rows(), t) = x;
  y_out->block(0, 0, y.rows(), t) = y;
  return t;
}

}  // namespace detail

// Mean per-utterance loss over a dataset at full length.
template <class S>
double evaluate_loss(const ModelParams<S>& m, const std::vector<TrainingPair<S>>& set) {
  if (set.empty()) {
    throw ConfigError("cannot evaluate an empty dataset");
  }
  double acc = 0.0;
  for (const auto& pair : set) {
    acc += mse_loss(forward(pair.noisy, m), pair.clean);
  }
  return acc / static_cast<double>(set.size());
}

// Epoch-driven AdaDelta training with seeded shuffling, per-epoch
// validation and best-snapshot selection. Identical seeds and data produce
// identical trajectories; wall_ms is the only nondeterministic log field.
template <class S>
TrainResult<S> train(const std::vector<TrainingPair<S>>& train_set,
                     const std::vector<TrainingPair<S>>& val_set, ModelParams<S> params,
                     const TrainConfig& cfg, Index start_epoch = 0) {
  validate(cfg);
  if (train_set.empty() || val_set.empty()) {
    throw ConfigError("training and validation sets must be non-empty");
  }
  if (cfg.crop_frames < params.hyper.kernel_width) {
    throw ConfigError("crop_frames must be at least the kernel width");
  }

  OptimizerState<S> opt = make_optimizer_state(params, cfg.rho, cfg.epsilon);
  CounterRng rng(cfg.seed);

  TrainResult<S> result;
  result.best = params;
  result.best_val = evaluate_loss(params, val_set);
  result.best_epoch = start_epoch - 1;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }

  Index global_step = 0;
  Index epochs_since_best = 0;
  for (Index epoch = start_epoch; epoch < start_epoch + cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr_mult = cfg.schedule.multiplier_at(epoch);
    rng.shuffle(order);

    double epoch_loss = 0.0;
    Index batches = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(end - begin);

      GradientSet<S> batch_grads = zero_params<S>(params.hyper);
      double batch_loss = 0.0;
      for (std::size_t idx = begin; idx < end; ++idx) {
        const TrainingPair<S>& pair = train_set[order[idx]];
        Mat<S> x, y;
        const Index valid =
            detail::crop_or_pad(pair.noisy, pair.clean, cfg.crop_frames, rng, &x, &y);
        ForwardCache<S> cache;
        forward(x, params, &cache);
        batch_loss += mse_loss(cache.pred, y, valid) * inv_batch;
        GradientSet<S> g = backward(params, cache, y, valid);
        visit_tensors(
            [inv_batch](const char*, Mat<S>& acc, const Mat<S>& gi) {
              acc += static_cast<S>(inv_batch) * gi;
            },
            batch_grads, g);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("training loss is not finite at epoch " +
                           std::to_string(epoch));
      }
      adadelta_step(&params, batch_grads, &opt, lr_mult);
      epoch_loss += batch_loss;
      ++batches;
      ++global_step;
    }
    epoch_loss /= static_cast<double>(batches);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.step = global_step;
    rec.train_loss = epoch_loss;
    rec.lr_multiplier = lr_mult;

    if ((epoch - start_epoch) % cfg.val_every == cfg.val_every - 1 ||
        epoch == start_epoch + cfg.epochs - 1) {
      const double val = evaluate_loss(params, val_set);
      if (!std::isfinite(val)) {
        throw NumericError("validation loss is not finite at epoch " +
                           std::to_string(epoch));
      }
      rec.val_loss = val;
      rec.validated = true;
      if (val < result.best_val) {
        result.best_val = val;
        result.best = params;
        result.best_epoch = epoch;
        epochs_since_best = 0;
      } else {
        ++epochs_since_best;
      }
    }

    rec.wall_ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count());
    result.log.push_back(rec);

    if (cfg.patience > 0 && epochs_since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

// Append-only line format: epoch, step, train_loss, val_loss ("-" when the
// epoch was not validated), lr multiplier, wall milliseconds.
inline std::string format_log_record(const EpochRecord& r) {
  char buf[160];
  char val[40];
  if (r.validated) {
    std::snprintf(val, sizeof(val), "%.12e", r.val_loss);
  } else {
    std::snprintf(val, sizeof(val), "-");
  }
  std::snprintf(buf, sizeof(buf), "%lld\t%lld\t%.12e\t%s\t%.3f\t%ld",
                static_cast<long long>(r.epoch), static_cast<long long>(r.step),
                r.train_loss, val, r.lr_multiplier, r.wall_ms);
  return buf;
}

inline void append_training_log(const std::string& path,
                                const std::vector<EpochRecord>& records) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw IoError("cannot open training log: " + path);
  }
  for (const auto& r : records) {
    out << format_log_record(r) << '\n';
  }
}

}  // namespace ehnet

#endif  // EHNET_TRAIN_HPP_
