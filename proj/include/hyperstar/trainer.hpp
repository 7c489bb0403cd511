#pragma once

#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperstar/checkpoint.hpp"
#include "hyperstar/dataset.hpp"
#include "hyperstar/nets.hpp"
#include "hyperstar/optimizer.hpp"

namespace hyperstar {

// Raised when a training loss stops being finite.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LossRow {
  int64_t iter = 0;
  std::string phase;  // "latent" or "reference"
  double adv_d = 0, adv_g = 0, sty = 0, ds = 0, cyc = 0, lambda_ds = 0;
};

std::string loss_csv_header();
std::string loss_csv_row(const LossRow& r);

// Source images with their domains plus two reference images from the
// sampled target domain, all in raw RGB layout [B,3,S,S].
struct Batch {
  Tensor x;
  Tensor x_ref, x_ref2;
  std::vector<int> y_src, y_trg;
};

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const Dataset& data);

  // One iteration: latent-guided phase, then reference-guided phase. Each
  // phase updates D on detached fakes, then the generator-side networks
  // (G, M, S in the latent phase; G, S in the reference phase).
  std::vector<LossRow> step();

  int64_t iter() const { return iter_; }
  const TrainConfig& config() const { return cfg_; }
  ModelBundle& bundle() { return *bundle_; }
  const Dataset& data() const { return *data_; }
  Adam& opt_g() { return opt_g_; }
  Adam& opt_m() { return opt_m_; }
  Adam& opt_s() { return opt_s_; }
  Adam& opt_d() { return opt_d_; }

  void save(const std::string& path);  // full training state
  void load(const std::string& path);  // resumes bit-identically

  Batch sample_batch();

 private:
  void check_finite(const LossRow& r) const;

  TrainConfig cfg_;
  const Dataset* data_;
  std::unique_ptr<ModelBundle> bundle_;
  Adam opt_g_, opt_m_, opt_s_, opt_d_;
  std::mt19937_64 rng_;
  int64_t iter_ = 0;  // completed iterations
};

// Model-only snapshot (no optimizer state): enough to run translation and to
// measure storage. Returns bytes written.
int64_t save_model(const ModelBundle& bundle, const std::string& path);
// Rebuilds a bundle from the config stored inside the checkpoint. Accepts
// both model-only and full training checkpoints.
std::unique_ptr<ModelBundle> load_model(const std::string& path);

}  // namespace hyperstar
