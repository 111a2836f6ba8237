#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "latsort/types.hpp"

namespace latsort {

/// Fully connected network with tanh hidden layers and a linear output.
/// weights[l] has shape (layer_sizes[l+1], layer_sizes[l]).
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t num_params() const;

  /// Throws if shapes do not chain with layer_sizes or a value is non-finite.
  void check() const;

  /// Batch forward pass; each column of `input` is one sample.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
};

/// Draws weights and biases from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
MlpParams init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed);

struct TrainMeta {
  int epochs_run = 0;
  double final_recon = 0.0;
  double final_lgp = 0.0;
  std::uint64_t seed = 0;
  double lgp_coefficient = 0.0;
};

/// Encoder f_e: R^N -> R and decoder f_d: R -> R^N.
struct LatentSortModel {
  MlpParams encoder;
  MlpParams decoder;
  std::size_t token_dim = 0;
  TrainMeta meta;

  void check() const;
};

LatentSortModel init_model(std::size_t token_dim, const std::vector<int>& hidden_sizes,
                           std::uint64_t seed);

double encode(const LatentSortModel& m, const Token& x);
Token decode(const LatentSortModel& m, double h);
std::vector<double> encode_batch(const LatentSortModel& m, std::span<const Token> xs);
Token reconstruct(const LatentSortModel& m, const Token& x);

enum class ReconLoss { L2, L1 };

struct LgpOptions {
  double alpha = 1.0;
  double beta = 1e-6;
  /// Restrict to pairs whose 1-based indices both lie in 2..M-1.
  bool literal_range = false;
};

/// Latent gradient penalty of one token set under latents `h`.
///
/// Tokens are ordered by `h` (stable), and for consecutive tokens a, b
///   g = ||x_a - x_b|| / (|h_a - h_b| + beta) - alpha,
/// each contributing 2 g^2 (the symmetric double sum counts (a,b) and (b,a)).
/// If `grad` is given it receives dLGP/dh per token, ordering held fixed.
double lgp_set_loss(std::span<const Token> tokens, std::span<const double> h,
                    const LgpOptions& opt, std::vector<double>* grad = nullptr);

/// LGP of an already sorted sequence using its keys as latents.
double lgp_loss(const SortedSequence& seq, const LgpOptions& opt);

struct TrainConfig {
  int epochs = 100;
  /// Token sets per optimizer step.
  int batch_size = 32;
  double peak_lr = 1e-3;
  double warmup_fraction = 0.10;
  double warmup_initial_lr = 1e-5;
  double final_lr = 1e-8;
  double lgp_coefficient = 0.05;
  LgpOptions lgp;
  ReconLoss recon = ReconLoss::L2;
  double weight_decay = 0.0;
  std::vector<int> hidden_sizes{64, 64};
  std::uint64_t seed = 0;

  void check() const;
};

/// Warmup (exponential from warmup_initial_lr to peak_lr) followed by cosine
/// decay to final_lr, resolved per optimizer step.
double scheduled_lr(const TrainConfig& cfg, long step, long total_steps);

struct LossParts {
  double recon = 0.0;
  double lgp = 0.0;
  double total = 0.0;
};

/// Gradients with the same layout as the model parameters.
struct ModelGrad {
  std::vector<Eigen::MatrixXd> enc_w, dec_w;
  std::vector<Eigen::VectorXd> enc_b, dec_b;
};

/// Loss of one mini-batch: mean reconstruction error over all tokens plus
/// lgp_coefficient times the mean per-set LGP (each set sorted by the current
/// encoder latents). Fills `grad` with the analytic gradient when non-null.
LossParts batch_loss(const LatentSortModel& m, std::span<const TokenSet* const> batch,
                     const TrainConfig& cfg, ModelGrad* grad = nullptr);

/// Flat parameter vector (encoder then decoder, weights then bias per layer).
std::vector<double> flatten_params(const LatentSortModel& m);
void assign_params(LatentSortModel& m, std::span<const double> flat);
std::vector<double> flatten_grad(const ModelGrad& g);

struct EpochStats {
  int epoch = 0;
  double recon = 0.0;
  double lgp = 0.0;
  double total = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  LatentSortModel model;
  std::vector<EpochStats> history;
};

/// Adam training of reconstruction + LGP. Deterministic given cfg.seed.
/// Throws Error on a non-finite loss.
TrainResult train(std::span<const TokenSet> data, const TrainConfig& cfg);

/// Raw encoder outputs for every token of `x`.
std::vector<double> latent_keys(const LatentSortModel& m, const TokenSet& x);

/// Sorts `x` ascending by encoder latent (stable). Reported keys are min-max
/// normalized over the set; a constant set reports all zeros.
SortedSequence latent_sort(const LatentSortModel& m, const TokenSet& x);

/// Min-max normalization to [0, 1]; constant input maps to all zeros.
std::vector<double> minmax_normalize(std::span<const double> v);

std::string model_to_json(const LatentSortModel& m);
LatentSortModel model_from_json(const std::string& text);
void save_model(const LatentSortModel& m, const std::filesystem::path& path);
LatentSortModel load_model(const std::filesystem::path& path);

/// CSV "epoch,recon,lgp,total,lr" with a header row.
std::string history_csv(const std::vector<EpochStats>& history);

}  // namespace latsort
