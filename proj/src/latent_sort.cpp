#include "latsort/latent_sort.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "latsort/io.hpp"
#include "latsort/rng.hpp"
#include "latsort/sorters.hpp"

namespace latsort {

// ---------------------------------------------------------------------------
// MLP

std::size_t MlpParams::num_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

void MlpParams::check() const {
  if (layer_sizes.size() < 2) throw Error("MLP needs at least an input and an output layer");
  for (int s : layer_sizes)
    if (s <= 0) throw Error("MLP layer sizes must be positive");
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size())
    throw Error("MLP layer count does not match layer_sizes");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l])
      throw Error("MLP weight " + std::to_string(l) + " disagrees with layer_sizes");
    if (biases[l].size() != layer_sizes[l + 1])
      throw Error("MLP bias " + std::to_string(l) + " disagrees with layer_sizes");
    if (!weights[l].allFinite() || !biases[l].allFinite())
      throw Error("MLP parameters must be finite");
  }
}

namespace {

// acts[0] is the input, acts[l + 1] the output of layer l.
void forward_cached(const MlpParams& p, const Eigen::MatrixXd& input,
                    std::vector<Eigen::MatrixXd>& acts) {
  const std::size_t layers = p.num_layers();
  acts.resize(layers + 1);
  acts[0] = input;
  for (std::size_t l = 0; l < layers; ++l) {
    acts[l + 1].noalias() = p.weights[l] * acts[l];
    acts[l + 1].colwise() += p.biases[l];
    if (l + 1 < layers) acts[l + 1] = acts[l + 1].array().tanh().matrix();
  }
}

// Accumulates parameter gradients for upstream gradient `delta` on the output
// and returns the gradient with respect to the input.
Eigen::MatrixXd backward(const MlpParams& p, const std::vector<Eigen::MatrixXd>& acts,
                         Eigen::MatrixXd delta, std::vector<Eigen::MatrixXd>& gw,
                         std::vector<Eigen::VectorXd>& gb) {
  for (std::size_t l = p.num_layers(); l-- > 0;) {
    gw[l].noalias() += delta * acts[l].transpose();
    gb[l] += delta.rowwise().sum();
    Eigen::MatrixXd up = p.weights[l].transpose() * delta;
    if (l > 0) up.array() *= 1.0 - acts[l].array().square();
    delta = std::move(up);
  }
  return delta;
}

void zero_like(const MlpParams& p, std::vector<Eigen::MatrixXd>& gw,
               std::vector<Eigen::VectorXd>& gb) {
  gw.resize(p.num_layers());
  gb.resize(p.num_layers());
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    gw[l] = Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols());
    gb[l] = Eigen::VectorXd::Zero(p.biases[l].size());
  }
}

Eigen::MatrixXd tokens_to_matrix(std::span<const Token> xs, std::size_t dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (xs[j].size() != dim) throw Error("token dimension does not match the model");
    for (std::size_t k = 0; k < dim; ++k)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = xs[j][k];
  }
  return m;
}

}  // namespace

Eigen::MatrixXd MlpParams::forward(const Eigen::MatrixXd& input) const {
  std::vector<Eigen::MatrixXd> acts;
  forward_cached(*this, input, acts);
  return acts.back();
}

MlpParams init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  MlpParams p;
  p.layer_sizes = layer_sizes;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    if (layer_sizes[l] <= 0 || layer_sizes[l + 1] <= 0)
      throw Error("MLP layer sizes must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer_sizes[l]));
    Eigen::MatrixXd w(layer_sizes[l + 1], layer_sizes[l]);
    Eigen::VectorXd b(layer_sizes[l + 1]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  p.check();
  return p;
}

void LatentSortModel::check() const {
  encoder.check();
  decoder.check();
  const int n = static_cast<int>(token_dim);
  if (encoder.input_dim() != n || decoder.output_dim() != n)
    throw Error("model widths disagree with token_dim");
  if (encoder.output_dim() != 1 || decoder.input_dim() != 1)
    throw Error("latent width must be 1");
}

LatentSortModel init_model(std::size_t token_dim, const std::vector<int>& hidden_sizes,
                           std::uint64_t seed) {
  if (token_dim == 0) throw Error("token dimension must be at least 1");
  std::vector<int> enc{static_cast<int>(token_dim)};
  enc.insert(enc.end(), hidden_sizes.begin(), hidden_sizes.end());
  enc.push_back(1);
  std::vector<int> dec{1};
  dec.insert(dec.end(), hidden_sizes.begin(), hidden_sizes.end());
  dec.push_back(static_cast<int>(token_dim));

  LatentSortModel m;
  m.token_dim = token_dim;
  m.encoder = init_mlp(enc, derive_seed(seed, "encoder"));
  m.decoder = init_mlp(dec, derive_seed(seed, "decoder"));
  m.meta.seed = seed;
  return m;
}

double encode(const LatentSortModel& m, const Token& x) {
  if (x.size() != m.token_dim) throw Error("token dimension does not match the model");
  return m.encoder.forward(tokens_to_matrix(std::span<const Token>(&x, 1), m.token_dim))(0, 0);
}

Token decode(const LatentSortModel& m, double h) {
  Eigen::MatrixXd in(1, 1);
  in(0, 0) = h;
  Eigen::MatrixXd out = m.decoder.forward(in);
  return Token(out.data(), out.data() + out.size());
}

std::vector<double> encode_batch(const LatentSortModel& m, std::span<const Token> xs) {
  if (xs.empty()) return {};
  Eigen::MatrixXd h = m.encoder.forward(tokens_to_matrix(xs, m.token_dim));
  return std::vector<double>(h.data(), h.data() + h.size());
}

Token reconstruct(const LatentSortModel& m, const Token& x) { return decode(m, encode(m, x)); }

// ---------------------------------------------------------------------------
// LGP

double lgp_set_loss(std::span<const Token> tokens, std::span<const double> h,
                    const LgpOptions& opt, std::vector<double>* grad) {
  const std::size_t m = tokens.size();
  if (h.size() != m) throw Error("latent count does not match token count");
  if (grad) grad->assign(m, 0.0);
  if (m < 2) return 0.0;

  const auto order = stable_argsort(std::vector<double>(h.begin(), h.end()));
  // pair k joins sorted positions k and k+1 (0-based)
  std::size_t first = 0, last = m - 1;
  if (opt.literal_range) {
    first = 1;
    last = m - 2;
  }
  double loss = 0.0;
  for (std::size_t k = first; k + 1 <= last && k + 1 < m; ++k) {
    const auto a = order[k];
    const auto b = order[k + 1];
    double dist2 = 0.0;
    for (std::size_t c = 0; c < tokens[a].size(); ++c) {
      const double d = tokens[a][c] - tokens[b][c];
      dist2 += d * d;
    }
    const double dist = std::sqrt(dist2);
    const double dh = h[b] - h[a];
    const double denom = std::abs(dh) + opt.beta;
    const double g = dist / denom - opt.alpha;
    loss += 2.0 * g * g;
    if (grad) {
      // d(2 g^2)/d(dh) = 4 g * (-dist / denom^2) * sign(dh)
      const double sign = dh > 0 ? 1.0 : (dh < 0 ? -1.0 : 0.0);
      const double d_dh = -4.0 * g * dist / (denom * denom) * sign;
      (*grad)[b] += d_dh;
      (*grad)[a] -= d_dh;
    }
  }
  return loss;
}

double lgp_loss(const SortedSequence& seq, const LgpOptions& opt) {
  if (!seq.keys) throw Error("lgp_loss needs a sequence with keys");
  seq.check();
  return lgp_set_loss(seq.rows, *seq.keys, opt);
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::check() const {
  if (epochs < 0) throw Error("epochs must be non-negative");
  if (batch_size < 1) throw Error("batch_size must be positive");
  if (!(peak_lr > 0) || !(warmup_initial_lr > 0) || !(final_lr > 0))
    throw Error("learning rates must be positive");
  if (!(warmup_fraction >= 0 && warmup_fraction < 1))
    throw Error("warmup fraction must lie in [0, 1)");
  if (!(lgp_coefficient >= 0)) throw Error("LGP coefficient must be non-negative");
  if (!(lgp.alpha > 0) || !(lgp.beta > 0)) throw Error("LGP alpha and beta must be positive");
  if (!(weight_decay >= 0)) throw Error("weight decay must be non-negative");
  for (int s : hidden_sizes)
    if (s <= 0) throw Error("hidden sizes must be positive");
}

double scheduled_lr(const TrainConfig& cfg, long step, long total_steps) {
  const long warmup = static_cast<long>(std::floor(cfg.warmup_fraction * static_cast<double>(total_steps)));
  if (step < warmup) {
    const double t = static_cast<double>(step) / static_cast<double>(warmup);
    return cfg.warmup_initial_lr * std::pow(cfg.peak_lr / cfg.warmup_initial_lr, t);
  }
  const long span = std::max(1L, total_steps - warmup - 1);
  const double progress = std::min(1.0, static_cast<double>(step - warmup) / static_cast<double>(span));
  return cfg.final_lr + (cfg.peak_lr - cfg.final_lr) * 0.5 * (1.0 + std::cos(M_PI * progress));
}

LossParts batch_loss(const LatentSortModel& m, std::span<const TokenSet* const> batch,
                     const TrainConfig& cfg, ModelGrad* grad) {
  std::vector<Token> all;
  std::vector<std::size_t> offsets{0};
  for (const auto* s : batch) {
    all.insert(all.end(), s->begin(), s->end());
    offsets.push_back(all.size());
  }
  if (all.empty()) throw Error("empty training batch");
  const Eigen::MatrixXd x = tokens_to_matrix(all, m.token_dim);
  const double count = static_cast<double>(x.size());

  std::vector<Eigen::MatrixXd> enc_acts, dec_acts;
  forward_cached(m.encoder, x, enc_acts);
  forward_cached(m.decoder, enc_acts.back(), dec_acts);
  const Eigen::MatrixXd diff = dec_acts.back() - x;

  LossParts out;
  Eigen::MatrixXd d_xhat;
  if (cfg.recon == ReconLoss::L2) {
    out.recon = diff.squaredNorm() / count;
    if (grad) d_xhat = (2.0 / count) * diff;
  } else {
    out.recon = diff.cwiseAbs().sum() / count;
    if (grad) d_xhat = diff.unaryExpr([&](double v) { return (v > 0) - (v < 0) + 0.0; }) / count;
  }

  const Eigen::RowVectorXd h = enc_acts.back().row(0);
  Eigen::RowVectorXd d_h_lgp = Eigen::RowVectorXd::Zero(h.size());
  double lgp_sum = 0.0;
  std::vector<double> g;
  const double sets = static_cast<double>(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto lo = offsets[s], n = offsets[s + 1] - offsets[s];
    std::span<const double> hs(h.data() + lo, n);
    lgp_sum += lgp_set_loss(batch[s]->tokens(), hs, cfg.lgp, grad ? &g : nullptr);
    if (grad)
      for (std::size_t i = 0; i < n; ++i)
        d_h_lgp(static_cast<Eigen::Index>(lo + i)) = cfg.lgp_coefficient * g[i] / sets;
  }
  out.lgp = lgp_sum / sets;
  out.total = out.recon + cfg.lgp_coefficient * out.lgp;

  if (cfg.weight_decay > 0) {
    double sq = 0.0;
    for (const auto* p : {&m.encoder, &m.decoder})
      for (std::size_t l = 0; l < p->num_layers(); ++l)
        sq += p->weights[l].squaredNorm() + p->biases[l].squaredNorm();
    out.total += 0.5 * cfg.weight_decay * sq;
  }

  if (grad) {
    zero_like(m.encoder, grad->enc_w, grad->enc_b);
    zero_like(m.decoder, grad->dec_w, grad->dec_b);
    Eigen::MatrixXd d_h = backward(m.decoder, dec_acts, d_xhat, grad->dec_w, grad->dec_b);
    d_h.row(0) += d_h_lgp;
    backward(m.encoder, enc_acts, d_h, grad->enc_w, grad->enc_b);
    if (cfg.weight_decay > 0) {
      for (std::size_t l = 0; l < m.encoder.num_layers(); ++l) {
        grad->enc_w[l] += cfg.weight_decay * m.encoder.weights[l];
        grad->enc_b[l] += cfg.weight_decay * m.encoder.biases[l];
      }
      for (std::size_t l = 0; l < m.decoder.num_layers(); ++l) {
        grad->dec_w[l] += cfg.weight_decay * m.decoder.weights[l];
        grad->dec_b[l] += cfg.weight_decay * m.decoder.biases[l];
      }
    }
  }
  return out;
}

namespace {

// Visits (parameter, gradient, size) triples in the flat-layout order.
template <class Model, class Grad, class F>
void for_each_tensor(Model& m, Grad& g, F&& f) {
  for (std::size_t l = 0; l < m.encoder.num_layers(); ++l) {
    f(m.encoder.weights[l].data(), g.enc_w[l].data(), m.encoder.weights[l].size());
    f(m.encoder.biases[l].data(), g.enc_b[l].data(), m.encoder.biases[l].size());
  }
  for (std::size_t l = 0; l < m.decoder.num_layers(); ++l) {
    f(m.decoder.weights[l].data(), g.dec_w[l].data(), m.decoder.weights[l].size());
    f(m.decoder.biases[l].data(), g.dec_b[l].data(), m.decoder.biases[l].size());
  }
}

template <class F>
void for_each_param(const LatentSortModel& m, F&& f) {
  for (const auto* p : {&m.encoder, &m.decoder})
    for (std::size_t l = 0; l < p->num_layers(); ++l) {
      f(p->weights[l].data(), p->weights[l].size());
      f(p->biases[l].data(), p->biases[l].size());
    }
}

class Adam {
 public:
  explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

  void step(LatentSortModel& model, ModelGrad& grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    std::size_t off = 0;
    for_each_tensor(model, grad, [&](double* p, const double* g, Eigen::Index n) {
      for (Eigen::Index i = 0; i < n; ++i, ++off) {
        m_[off] = kBeta1 * m_[off] + (1.0 - kBeta1) * g[i];
        v_[off] = kBeta2 * v_[off] + (1.0 - kBeta2) * g[i] * g[i];
        p[i] -= lr * (m_[off] / c1) / (std::sqrt(v_[off] / c2) + kEps);
      }
    });
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  std::vector<double> m_, v_;
  long t_ = 0;
};

}  // namespace

std::vector<double> flatten_params(const LatentSortModel& m) {
  std::vector<double> out;
  for_each_param(m, [&](const double* p, Eigen::Index n) { out.insert(out.end(), p, p + n); });
  return out;
}

void assign_params(LatentSortModel& m, std::span<const double> flat) {
  std::size_t off = 0;
  auto take = [&](double* dst, Eigen::Index n) {
    if (off + static_cast<std::size_t>(n) > flat.size()) throw Error("flat parameter vector too short");
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), n, dst);
    off += static_cast<std::size_t>(n);
  };
  for (auto* p : {&m.encoder, &m.decoder})
    for (std::size_t l = 0; l < p->num_layers(); ++l) {
      take(p->weights[l].data(), p->weights[l].size());
      take(p->biases[l].data(), p->biases[l].size());
    }
  if (off != flat.size()) throw Error("flat parameter vector has the wrong length");
}

std::vector<double> flatten_grad(const ModelGrad& g) {
  std::vector<double> out;
  auto add = [&](const auto& t) { out.insert(out.end(), t.data(), t.data() + t.size()); };
  for (std::size_t l = 0; l < g.enc_w.size(); ++l) {
    add(g.enc_w[l]);
    add(g.enc_b[l]);
  }
  for (std::size_t l = 0; l < g.dec_w.size(); ++l) {
    add(g.dec_w[l]);
    add(g.dec_b[l]);
  }
  return out;
}

TrainResult train(std::span<const TokenSet> data, const TrainConfig& cfg) {
  cfg.check();
  if (data.empty()) throw Error("training data is empty");
  const std::size_t dim = data.front().dim();
  for (const auto& s : data)
    if (s.dim() != dim) throw Error("training sets do not share a token dimension");

  TrainResult result;
  result.model = init_model(dim, cfg.hidden_sizes, derive_seed(cfg.seed, "init"));
  auto& model = result.model;
  model.meta.seed = cfg.seed;
  model.meta.lgp_coefficient = cfg.lgp_coefficient;

  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  const long steps_per_epoch = static_cast<long>((data.size() + bs - 1) / bs);
  const long total_steps = steps_per_epoch * cfg.epochs;

  Adam adam(model.encoder.num_params() + model.decoder.num_params());
  ModelGrad grad;
  std::vector<std::size_t> perm(data.size());
  std::vector<const TokenSet*> batch;
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    rng.shuffle(perm.begin(), perm.end());

    EpochStats stats;
    stats.epoch = epoch + 1;
    double weight = 0.0;
    for (std::size_t lo = 0; lo < perm.size(); lo += bs) {
      batch.clear();
      for (std::size_t i = lo; i < std::min(perm.size(), lo + bs); ++i) batch.push_back(&data[perm[i]]);
      const double lr = scheduled_lr(cfg, step, total_steps);
      const LossParts parts = batch_loss(model, batch, cfg, &grad);
      if (!std::isfinite(parts.total)) {
        std::ostringstream msg;
        msg << "non-finite training loss at epoch " << epoch + 1 << " (lr " << lr << ")";
        throw Error(msg.str());
      }
      adam.step(model, grad, lr);
      const double w = static_cast<double>(batch.size());
      stats.recon += w * parts.recon;
      stats.lgp += w * parts.lgp;
      stats.total += w * parts.total;
      weight += w;
      stats.lr = lr;
      ++step;
    }
    stats.recon /= weight;
    stats.lgp /= weight;
    stats.total /= weight;
    result.history.push_back(stats);
  }
  model.meta.epochs_run = cfg.epochs;
  if (!result.history.empty()) {
    model.meta.final_recon = result.history.back().recon;
    model.meta.final_lgp = result.history.back().lgp;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sorting

std::vector<double> latent_keys(const LatentSortModel& m, const TokenSet& x) {
  if (x.dim() != m.token_dim) throw Error("token dimension does not match the model");
  return encode_batch(m, x.tokens());
}

std::vector<double> minmax_normalize(std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  if (v.empty()) return out;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  if (range > 0)
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
  return out;
}

SortedSequence latent_sort(const LatentSortModel& m, const TokenSet& x) {
  const auto raw = latent_keys(m, x);
  auto seq = sort_by_keys(x, raw);
  seq.keys = minmax_normalize(*seq.keys);
  return seq;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void append_mlp(std::string& out, const MlpParams& p) {
  out += "{\"layer_sizes\":[";
  for (std::size_t i = 0; i < p.layer_sizes.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(p.layer_sizes[i]);
  }
  out += "],\"weights\":[";
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    if (l) out += ",";
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = p.weights[l];
    append_array(out, std::vector<double>(rm.data(), rm.data() + rm.size()));
  }
  out += "],\"biases\":[";
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    if (l) out += ",";
    append_array(out, std::vector<double>(p.biases[l].data(), p.biases[l].data() + p.biases[l].size()));
  }
  out += "]}";
}

MlpParams mlp_from_json(const nlohmann::json& j, const char* name) {
  MlpParams p;
  p.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  const auto w = j.at("weights").get<std::vector<std::vector<double>>>();
  const auto b = j.at("biases").get<std::vector<std::vector<double>>>();
  if (p.layer_sizes.size() < 2 || w.size() != p.layer_sizes.size() - 1 || b.size() != w.size())
    throw Error(std::string(name) + ": layer count disagrees with layer_sizes");
  for (std::size_t l = 0; l < w.size(); ++l) {
    const int rows = p.layer_sizes[l + 1], cols = p.layer_sizes[l];
    if (rows <= 0 || cols <= 0) throw Error(std::string(name) + ": layer sizes must be positive");
    if (w[l].size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
      throw Error(std::string(name) + ": weight " + std::to_string(l) + " shape disagrees with layer_sizes");
    if (b[l].size() != static_cast<std::size_t>(rows))
      throw Error(std::string(name) + ": bias " + std::to_string(l) + " shape disagrees with layer_sizes");
    p.weights.emplace_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        w[l].data(), rows, cols));
    p.biases.emplace_back(Eigen::Map<const Eigen::VectorXd>(b[l].data(), rows));
  }
  p.check();
  return p;
}

}  // namespace

std::string model_to_json(const LatentSortModel& m) {
  std::string out = "{\"version\":1,\"token_dim\":" + std::to_string(m.token_dim) + ",\"encoder\":";
  append_mlp(out, m.encoder);
  out += ",\"decoder\":";
  append_mlp(out, m.decoder);
  out += ",\"meta\":{\"epochs_run\":" + std::to_string(m.meta.epochs_run) +
         ",\"final_recon\":" + format_double(m.meta.final_recon) +
         ",\"final_lgp\":" + format_double(m.meta.final_lgp) +
         ",\"seed\":" + std::to_string(m.meta.seed) +
         ",\"lgp_coefficient\":" + format_double(m.meta.lgp_coefficient) + "}}\n";
  return out;
}

LatentSortModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
  try {
    const int version = j.at("version").get<int>();
    if (version != 1) throw Error("unsupported model version " + std::to_string(version));
    LatentSortModel m;
    m.token_dim = j.at("token_dim").get<std::size_t>();
    m.encoder = mlp_from_json(j.at("encoder"), "encoder");
    m.decoder = mlp_from_json(j.at("decoder"), "decoder");
    if (j.contains("meta")) {
      const auto& meta = j.at("meta");
      m.meta.epochs_run = meta.value("epochs_run", 0);
      m.meta.final_recon = meta.value("final_recon", 0.0);
      m.meta.final_lgp = meta.value("final_lgp", 0.0);
      m.meta.seed = meta.value("seed", std::uint64_t{0});
      m.meta.lgp_coefficient = meta.value("lgp_coefficient", 0.0);
    }
    m.check();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const LatentSortModel& m, const std::filesystem::path& path) {
  write_text(path, model_to_json(m));
}

LatentSortModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,recon,lgp,total,lr\n";
  for (const auto& h : history) {
    out += std::to_string(h.epoch) + "," + format_double(h.recon) + "," + format_double(h.lgp) +
           "," + format_double(h.total) + "," + format_double(h.lr) + "\n";
  }
  return out;
}

}  // namespace latsort
