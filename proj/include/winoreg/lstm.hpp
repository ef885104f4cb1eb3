#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "winoreg/rng.hpp"

namespace winoreg {

/// Lemma -> id map; id 0 is reserved for padding and unknown lemmas. Ids are
/// assigned 1-based in first-occurrence order, so the mapping is stable.
class Vocabulary {
  public:
    static Vocabulary build(const std::vector<std::vector<std::string>>& documents);

    /// 0 for unknown lemmas.
    std::size_t id(const std::string& lemma) const;
    std::size_t size() const { return lemmas_.size(); }
    const std::vector<std::string>& lemmas() const { return lemmas_; }
    void add(const std::string& lemma); ///< no-op when already known

  private:
    std::vector<std::string> lemmas_;
    std::unordered_map<std::string, std::size_t> ids_;
};

/// Fixed-length id sequence: pad with 0, truncate beyond seq_len.
std::vector<std::size_t> encode(const std::vector<std::string>& tokens,
                                const Vocabulary& vocab, std::size_t seq_len = 50);

struct LstmConfig {
    std::size_t units = 87;
    std::size_t embed_dim = 50;
    std::size_t seq_len = 50;
    double dropout = 0.2;           ///< input dropout rate
    double recurrent_dropout = 0.2; ///< hidden-state dropout rate
    std::uint64_t seed = 0;
};

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 0.002; // Adamax defaults
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double validation_fraction = 0.3;
    std::uint64_t seed = 0;
};

struct EpochStats {
    double train_mae = 0.0;
    double val_mae = 0.0;
};

/// Embedding -> single LSTM layer -> linear unit. Parameters live in one flat
/// array laid out [embedding | W (input->gates) | U (hidden->gates) | b |
/// head weights | head bias], gate row order i, f, g, o; the forget-gate bias
/// block starts at 1.0. Inference is deterministic; dropout (inverted,
/// per-sequence "variational" masks) applies only while training.
class LstmModel {
  public:
    LstmModel(Vocabulary vocab, LstmConfig config); // random init from config.seed

    const Vocabulary& vocab() const { return vocab_; }
    const LstmConfig& config() const { return config_; }
    std::size_t param_count() const { return params_.size(); }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& mutable_params() { return params_; }

    /// Raw linear-head output over the given ids (any length; id 0 steps are
    /// masked and leave the state untouched). Throws on out-of-range ids.
    double raw_output(const std::vector<std::size_t>& sequence) const;

    /// raw_output clamped to [0,1] — the reported hardness index.
    double predict(const std::vector<std::size_t>& sequence) const;

    /// MAE-loss gradient for one (sequence, target) pair via backpropagation
    /// through time; returns the loss. Dropout masks are drawn from `rng`
    /// when training is true. The gradient buffer is accumulated into (must
    /// be param_count() long).
    double backward(const std::vector<std::size_t>& sequence, double target,
                    std::vector<double>& grad, bool training, SplitMix64* rng) const;

    // Flat-layout section offsets (used by persistence and the checker).
    std::size_t offset_embedding() const { return 0; }
    std::size_t offset_input_weights() const;
    std::size_t offset_recurrent_weights() const;
    std::size_t offset_bias() const;
    std::size_t offset_head() const;

  private:
    LstmModel() = default; // used by load_lstm
    friend LstmModel load_lstm(const std::string& path);
    struct Trace;
    double run(const std::vector<std::size_t>& sequence, Trace* trace,
               bool training, SplitMix64* rng) const;

    Vocabulary vocab_;
    LstmConfig config_;
    std::vector<double> params_;
};

/// Trains in place: last `validation_fraction` of the data is held out
/// (train size = floor(n * (1 - fraction))), batches are reshuffled each
/// epoch from cfg.seed, updates use Adamax. Returns per-epoch statistics.
std::vector<EpochStats> train_lstm(LstmModel& model,
                                   const std::vector<std::vector<std::size_t>>& sequences,
                                   const std::vector<double>& targets,
                                   const TrainConfig& cfg);

struct GradientCheckOptions {
    double epsilon = 1e-5;
    std::size_t coords = 240; ///< sampled coordinates, spread over all sections
    std::uint64_t seed = 1;
    /// Negative control: corrupts the analytic forget-gate gradient so the
    /// check must fail.
    bool corrupt_forget_gate = false;
};

/// Max relative error between analytic and central-difference gradients of
/// the MAE loss on one sequence. The target is offset from the model output
/// so the loss is differentiable at the evaluation point.
double gradient_check(const LstmModel& model, const std::vector<std::size_t>& sequence,
                      const GradientCheckOptions& options = {});

/// Binary persistence (magic "WRLSTM01", little-endian doubles, vocabulary
/// embedded). Round-trips inference bit-exactly.
void save_lstm(const LstmModel& model, const std::string& path);
LstmModel load_lstm(const std::string& path);

} // namespace winoreg
