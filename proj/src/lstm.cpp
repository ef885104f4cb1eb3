#include "winoreg/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "winoreg/error.hpp"

namespace winoreg {

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& documents) {
    Vocabulary v;
    for (const auto& doc : documents) {
        for (const auto& lemma : doc) {
            v.add(lemma);
        }
    }
    return v;
}

std::size_t Vocabulary::id(const std::string& lemma) const {
    auto it = ids_.find(lemma);
    return it == ids_.end() ? 0 : it->second;
}

void Vocabulary::add(const std::string& lemma) {
    if (ids_.count(lemma) != 0) {
        return;
    }
    lemmas_.push_back(lemma);
    ids_.emplace(lemma, lemmas_.size()); // 1-based
}

std::vector<std::size_t> encode(const std::vector<std::string>& tokens,
                                const Vocabulary& vocab, std::size_t seq_len) {
    std::vector<std::size_t> ids(seq_len, 0);
    const std::size_t n = std::min(tokens.size(), seq_len);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = vocab.id(tokens[i]);
    }
    return ids;
}

// ---------------------------------------------------------------------------
// Model layout and initialization
// ---------------------------------------------------------------------------

namespace {

struct Layout {
    std::size_t vocab_rows;  // vocab size + 1 for the padding row
    std::size_t embed_dim;   // D
    std::size_t units;       // H
    std::size_t embedding;   // offsets into the flat parameter array
    std::size_t input_w;     // 4H x D, gate-major rows (i, f, g, o)
    std::size_t recurrent_w; // 4H x H
    std::size_t bias;        // 4H
    std::size_t head_w;      // H
    std::size_t head_b;      // 1
    std::size_t total;
};

Layout layout_of(std::size_t vocab_size, const LstmConfig& cfg) {
    Layout l;
    l.vocab_rows = vocab_size + 1;
    l.embed_dim = cfg.embed_dim;
    l.units = cfg.units;
    l.embedding = 0;
    l.input_w = l.embedding + l.vocab_rows * l.embed_dim;
    l.recurrent_w = l.input_w + 4 * l.units * l.embed_dim;
    l.bias = l.recurrent_w + 4 * l.units * l.units;
    l.head_w = l.bias + 4 * l.units;
    l.head_b = l.head_w + l.units;
    l.total = l.head_b + 1;
    return l;
}

void check_config(const LstmConfig& cfg) {
    if (cfg.units == 0 || cfg.embed_dim == 0 || cfg.seq_len == 0) {
        throw ConfigError("lstm dimensions must be positive");
    }
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0 || cfg.recurrent_dropout < 0.0 ||
        cfg.recurrent_dropout >= 1.0) {
        throw ConfigError("dropout rates must lie in [0, 1)");
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

LstmModel::LstmModel(Vocabulary vocab, LstmConfig config)
    : vocab_(std::move(vocab)), config_(config) {
    check_config(config_);
    const Layout l = layout_of(vocab_.size(), config_);
    params_.assign(l.total, 0.0);

    // Uniform embeddings, Glorot-style fan-based limits for the weight
    // blocks; draw order is fixed (embedding, input, recurrent, head) so a
    // given seed always produces the same model.
    SplitMix64 rng(config_.seed);
    for (std::size_t j = l.embedding; j < l.input_w; ++j) {
        params_[j] = rng.uniform(-0.05, 0.05);
    }
    const double limit_w = std::sqrt(6.0 / double(l.embed_dim + 4 * l.units));
    for (std::size_t j = l.input_w; j < l.recurrent_w; ++j) {
        params_[j] = rng.uniform(-limit_w, limit_w);
    }
    const double limit_u = std::sqrt(6.0 / double(l.units + 4 * l.units));
    for (std::size_t j = l.recurrent_w; j < l.bias; ++j) {
        params_[j] = rng.uniform(-limit_u, limit_u);
    }
    // Biases start at zero except the forget-gate block, which starts at 1 so
    // early training does not wipe the cell state.
    for (std::size_t u = 0; u < l.units; ++u) {
        params_[l.bias + l.units + u] = 1.0;
    }
    const double limit_h = std::sqrt(6.0 / double(l.units + 1));
    for (std::size_t j = l.head_w; j < l.head_b; ++j) {
        params_[j] = rng.uniform(-limit_h, limit_h);
    }
    params_[l.head_b] = 0.0;
}

std::size_t LstmModel::offset_input_weights() const {
    return layout_of(vocab_.size(), config_).input_w;
}
std::size_t LstmModel::offset_recurrent_weights() const {
    return layout_of(vocab_.size(), config_).recurrent_w;
}
std::size_t LstmModel::offset_bias() const { return layout_of(vocab_.size(), config_).bias; }
std::size_t LstmModel::offset_head() const { return layout_of(vocab_.size(), config_).head_w; }

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

// Everything the backward pass needs, recorded for each unmasked step.
struct LstmModel::Trace {
    struct Step {
        std::size_t token = 0;
        std::vector<double> x;      // embedding after input dropout (D)
        std::vector<double> h_prev; // hidden state entering the step (H)
        std::vector<double> h_in;   // h_prev after recurrent dropout (H)
        std::vector<double> c_prev; // cell state entering the step (H)
        std::vector<double> i, f, g, o;
        std::vector<double> tanh_c;
    };
    std::vector<Step> steps;
    std::vector<double> h_final;
    std::vector<double> input_mask;     // per-sequence dropout masks
    std::vector<double> recurrent_mask; // (inverted scaling baked in)
};

double LstmModel::run(const std::vector<std::size_t>& sequence, Trace* trace,
                      bool training, SplitMix64* rng) const {
    const Layout l = layout_of(vocab_.size(), config_);
    const std::size_t h_n = l.units;
    const std::size_t d_n = l.embed_dim;
    const double* w = params_.data() + l.input_w;
    const double* u = params_.data() + l.recurrent_w;
    const double* b = params_.data() + l.bias;

    for (std::size_t id : sequence) {
        if (id >= l.vocab_rows) {
            throw DimensionError("token id " + std::to_string(id) +
                                 " is outside the vocabulary (size " +
                                 std::to_string(vocab_.size()) + ")");
        }
    }

    // "Variational" dropout: one mask per sequence, reused at every step,
    // with inverted scaling so inference needs no correction.
    std::vector<double> input_mask(d_n, 1.0);
    std::vector<double> recurrent_mask(h_n, 1.0);
    if (training && rng != nullptr) {
        if (config_.dropout > 0.0) {
            const double keep = 1.0 - config_.dropout;
            for (auto& m : input_mask) {
                m = rng->uniform() < keep ? 1.0 / keep : 0.0;
            }
        }
        if (config_.recurrent_dropout > 0.0) {
            const double keep = 1.0 - config_.recurrent_dropout;
            for (auto& m : recurrent_mask) {
                m = rng->uniform() < keep ? 1.0 / keep : 0.0;
            }
        }
    }

    std::vector<double> h(h_n, 0.0);
    std::vector<double> c(h_n, 0.0);
    std::vector<double> x(d_n), h_in(h_n), pre(4 * h_n);

    for (std::size_t id : sequence) {
        if (id == 0) {
            continue; // padding: state carries through unchanged
        }
        const double* e_row = params_.data() + l.embedding + id * d_n;
        for (std::size_t d = 0; d < d_n; ++d) {
            x[d] = e_row[d] * input_mask[d];
        }
        for (std::size_t k = 0; k < h_n; ++k) {
            h_in[k] = h[k] * recurrent_mask[k];
        }
        for (std::size_t j = 0; j < 4 * h_n; ++j) {
            double acc = b[j];
            const double* w_row = w + j * d_n;
            for (std::size_t d = 0; d < d_n; ++d) {
                acc += w_row[d] * x[d];
            }
            const double* u_row = u + j * h_n;
            for (std::size_t k = 0; k < h_n; ++k) {
                acc += u_row[k] * h_in[k];
            }
            pre[j] = acc;
        }

        Trace::Step step;
        if (trace != nullptr) {
            step.token = id;
            step.x = x;
            step.h_prev = h;
            step.h_in = h_in;
            step.c_prev = c;
            step.i.resize(h_n);
            step.f.resize(h_n);
            step.g.resize(h_n);
            step.o.resize(h_n);
            step.tanh_c.resize(h_n);
        }
        for (std::size_t k = 0; k < h_n; ++k) {
            const double gi = sigmoid(pre[k]);
            const double gf = sigmoid(pre[h_n + k]);
            const double gg = std::tanh(pre[2 * h_n + k]);
            const double go = sigmoid(pre[3 * h_n + k]);
            c[k] = gf * c[k] + gi * gg;
            const double tc = std::tanh(c[k]);
            h[k] = go * tc;
            if (trace != nullptr) {
                step.i[k] = gi;
                step.f[k] = gf;
                step.g[k] = gg;
                step.o[k] = go;
                step.tanh_c[k] = tc;
            }
        }
        if (trace != nullptr) {
            trace->steps.push_back(std::move(step));
        }
    }

    double raw = params_[l.head_b];
    const double* head = params_.data() + l.head_w;
    for (std::size_t k = 0; k < h_n; ++k) {
        raw += head[k] * h[k];
    }
    if (trace != nullptr) {
        trace->h_final = std::move(h);
        trace->input_mask = std::move(input_mask);
        trace->recurrent_mask = std::move(recurrent_mask);
    }
    return raw;
}

double LstmModel::raw_output(const std::vector<std::size_t>& sequence) const {
    return run(sequence, nullptr, false, nullptr);
}

double LstmModel::predict(const std::vector<std::size_t>& sequence) const {
    return std::clamp(raw_output(sequence), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Backward pass (BPTT for MAE loss)
// ---------------------------------------------------------------------------

double LstmModel::backward(const std::vector<std::size_t>& sequence, double target,
                           std::vector<double>& grad, bool training,
                           SplitMix64* rng) const {
    const Layout l = layout_of(vocab_.size(), config_);
    if (grad.size() != params_.size()) {
        throw DimensionError("gradient buffer has " + std::to_string(grad.size()) +
                             " entries, expected " + std::to_string(params_.size()));
    }
    if (!std::isfinite(target)) {
        throw NumericError("training target is not finite");
    }

    Trace trace;
    const double raw = run(sequence, &trace, training, rng);
    const double loss = std::abs(raw - target);
    // Subgradient 0 at the kink: nothing to propagate.
    if (raw == target) {
        return loss;
    }
    const double d_raw = raw > target ? 1.0 : -1.0;

    const std::size_t h_n = l.units;
    const std::size_t d_n = l.embed_dim;
    const double* w = params_.data() + l.input_w;
    const double* u = params_.data() + l.recurrent_w;
    const double* head = params_.data() + l.head_w;

    std::vector<double> dh(h_n), dc(h_n, 0.0);
    for (std::size_t k = 0; k < h_n; ++k) {
        grad[l.head_w + k] += d_raw * trace.h_final[k];
        dh[k] = d_raw * head[k];
    }
    grad[l.head_b] += d_raw;

    std::vector<double> dpre(4 * h_n);
    for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
        const Trace::Step& s = *it;
        for (std::size_t k = 0; k < h_n; ++k) {
            const double d_o = dh[k] * s.tanh_c[k];
            const double d_c = dc[k] + dh[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
            const double d_i = d_c * s.g[k];
            const double d_g = d_c * s.i[k];
            const double d_f = d_c * s.c_prev[k];
            dpre[k] = d_i * s.i[k] * (1.0 - s.i[k]);
            dpre[h_n + k] = d_f * s.f[k] * (1.0 - s.f[k]);
            dpre[2 * h_n + k] = d_g * (1.0 - s.g[k] * s.g[k]);
            dpre[3 * h_n + k] = d_o * s.o[k] * (1.0 - s.o[k]);
            dc[k] = d_c * s.f[k];
        }
        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t j = 0; j < 4 * h_n; ++j) {
            const double dj = dpre[j];
            grad[l.bias + j] += dj;
            double* gw_row = grad.data() + l.input_w + j * d_n;
            for (std::size_t d = 0; d < d_n; ++d) {
                gw_row[d] += dj * s.x[d];
            }
            double* gu_row = grad.data() + l.recurrent_w + j * h_n;
            const double* u_row = u + j * h_n;
            for (std::size_t k = 0; k < h_n; ++k) {
                gu_row[k] += dj * s.h_in[k];
                dh[k] += u_row[k] * dj;
            }
        }
        // dh currently holds d(h_in); undo the recurrent mask to reach h_prev.
        for (std::size_t k = 0; k < h_n; ++k) {
            dh[k] *= trace.recurrent_mask[k];
        }
        double* ge_row = grad.data() + l.embedding + s.token * d_n;
        for (std::size_t d = 0; d < d_n; ++d) {
            double dx = 0.0;
            for (std::size_t j = 0; j < 4 * h_n; ++j) {
                dx += w[j * d_n + d] * dpre[j];
            }
            ge_row[d] += dx * trace.input_mask[d];
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Training (Adamax)
// ---------------------------------------------------------------------------

std::vector<EpochStats> train_lstm(LstmModel& model,
                                   const std::vector<std::vector<std::size_t>>& sequences,
                                   const std::vector<double>& targets,
                                   const TrainConfig& cfg) {
    if (sequences.empty()) {
        throw EmptyInput("training set is empty");
    }
    if (sequences.size() != targets.size()) {
        throw DimensionError("got " + std::to_string(sequences.size()) + " sequences but " +
                             std::to_string(targets.size()) + " targets");
    }
    if (cfg.batch_size == 0) {
        throw ConfigError("batch_size must be positive");
    }
    if (cfg.validation_fraction <= 0.0 || cfg.validation_fraction >= 1.0) {
        throw ConfigError("validation_fraction must lie in (0, 1)");
    }
    if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0 ||
        cfg.epsilon <= 0.0 || !std::isfinite(cfg.learning_rate)) {
        throw ConfigError("invalid optimizer settings");
    }
    for (double t : targets) {
        if (!std::isfinite(t)) {
            throw NumericError("non-finite training target");
        }
    }

    const std::size_t n = sequences.size();
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(double(n) * (1.0 - cfg.validation_fraction)));
    const std::size_t n_val = n - n_train;
    if (n_train == 0 || n_val == 0) {
        throw DegenerateSplit("cannot hold out " + std::to_string(n_val) + " of " +
                              std::to_string(n) + " samples for validation");
    }

    const std::size_t p = model.param_count();
    std::vector<double> grad(p), m(p, 0.0), u(p, 0.0);
    std::vector<double>& params = model.mutable_params();
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    SplitMix64 root(cfg.seed);
    std::vector<EpochStats> history;
    history.reserve(cfg.epochs);
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        SplitMix64 shuffle_rng = root.fork(2 * epoch);
        SplitMix64 dropout_rng = root.fork(2 * epoch + 1);
        for (std::size_t i = n_train; i-- > 1;) {
            std::swap(order[i], order[shuffle_rng.below(i + 1)]);
        }

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            const std::size_t stop = std::min(start + cfg.batch_size, n_train);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t idx = order[i];
                batch_loss += model.backward(sequences[idx], targets[idx], grad,
                                             /*training=*/true, &dropout_rng);
            }
            if (!std::isfinite(batch_loss)) {
                throw NumericError("loss diverged at epoch " + std::to_string(epoch + 1));
            }
            epoch_loss += batch_loss;

            const double scale = 1.0 / double(stop - start);
            ++step;
            const double rate = cfg.learning_rate / (1.0 - std::pow(cfg.beta1, double(step)));
            for (std::size_t j = 0; j < p; ++j) {
                const double g = grad[j] * scale;
                m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
                u[j] = std::max(cfg.beta2 * u[j], std::abs(g));
                params[j] -= rate * m[j] / (u[j] + cfg.epsilon);
            }
        }

        EpochStats stats;
        stats.train_mae = epoch_loss / double(n_train);
        double val_loss = 0.0;
        for (std::size_t i = n_train; i < n; ++i) {
            val_loss += std::abs(model.raw_output(sequences[i]) - targets[i]);
        }
        stats.val_mae = val_loss / double(n_val);
        history.push_back(stats);
    }
    return history;
}

// ---------------------------------------------------------------------------
// Gradient check
// ---------------------------------------------------------------------------

double gradient_check(const LstmModel& model, const std::vector<std::size_t>& sequence,
                      const GradientCheckOptions& options) {
    if (options.epsilon <= 0.0) {
        throw ConfigError("gradient-check epsilon must be positive");
    }
    if (options.coords == 0) {
        throw ConfigError("gradient-check needs at least one coordinate");
    }

    LstmModel probe = model;
    // Offsetting the target away from the current output keeps the loss away
    // from the |.| kink for every small parameter perturbation.
    const double target = probe.raw_output(sequence) + 0.25;

    std::vector<double> analytic(probe.param_count(), 0.0);
    probe.backward(sequence, target, analytic, /*training=*/false, nullptr);

    const std::size_t off_w = probe.offset_input_weights();
    const std::size_t off_u = probe.offset_recurrent_weights();
    const std::size_t off_b = probe.offset_bias();
    const std::size_t off_h = probe.offset_head();
    const std::size_t units = probe.config().units;

    if (options.corrupt_forget_gate) {
        // Negative control: damage the forget-gate rows of W, U and b.
        for (std::size_t j = off_w + units * probe.config().embed_dim;
             j < off_w + 2 * units * probe.config().embed_dim; ++j) {
            analytic[j] = 2.0 * analytic[j] + 0.01;
        }
        for (std::size_t j = off_u + units * units; j < off_u + 2 * units * units; ++j) {
            analytic[j] = 2.0 * analytic[j] + 0.01;
        }
        for (std::size_t j = off_b + units; j < off_b + 2 * units; ++j) {
            analytic[j] = 2.0 * analytic[j] + 0.01;
        }
    }

    // Sample coordinates bucket by bucket so every section — including each
    // of the four gate blocks — is exercised.
    struct Bucket {
        std::size_t begin, end;
    };
    const std::size_t wd = units * probe.config().embed_dim;
    const std::size_t uu = units * units;
    std::vector<Bucket> buckets = {
        {0, off_w},                              // embedding
        {off_w, off_w + wd},                     // W input gate
        {off_w + wd, off_w + 2 * wd},            // W forget gate
        {off_w + 2 * wd, off_w + 3 * wd},        // W cell gate
        {off_w + 3 * wd, off_w + 4 * wd},        // W output gate
        {off_u, off_u + uu},                     // U input gate
        {off_u + uu, off_u + 2 * uu},            // U forget gate
        {off_u + 2 * uu, off_u + 3 * uu},        // U cell gate
        {off_u + 3 * uu, off_u + 4 * uu},        // U output gate
        {off_b, off_b + units},                  // bias input
        {off_b + units, off_b + 2 * units},      // bias forget
        {off_b + 2 * units, off_b + 3 * units},  // bias cell
        {off_b + 3 * units, off_b + 4 * units},  // bias output
        {off_h, probe.param_count()},            // head
    };

    SplitMix64 rng(options.seed);
    std::vector<double>& params = probe.mutable_params();
    const std::size_t per_bucket = (options.coords + buckets.size() - 1) / buckets.size();
    double worst = 0.0;
    for (const Bucket& bucket : buckets) {
        const std::size_t width = bucket.end - bucket.begin;
        for (std::size_t s = 0; s < per_bucket; ++s) {
            const std::size_t j = bucket.begin + rng.below(width);
            const double saved = params[j];
            params[j] = saved + options.epsilon;
            const double plus = std::abs(probe.raw_output(sequence) - target);
            params[j] = saved - options.epsilon;
            const double minus = std::abs(probe.raw_output(sequence) - target);
            params[j] = saved;
            const double numeric = (plus - minus) / (2.0 * options.epsilon);
            const double rel = std::abs(analytic[j] - numeric) /
                               std::max(std::abs(analytic[j]) + std::abs(numeric), 1e-10);
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'W', 'R', 'L', 'S', 'T', 'M', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= std::uint64_t(buf[i]) << (8 * i);
    }
    return v;
}

void write_f64(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(out, bits);
}

double read_f64(std::istream& in) {
    const std::uint64_t bits = read_u64(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

} // namespace

void save_lstm(const LstmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(kMagic, 8);
    const LstmConfig& cfg = model.config();
    write_u64(out, cfg.units);
    write_u64(out, cfg.embed_dim);
    write_u64(out, cfg.seq_len);
    write_f64(out, cfg.dropout);
    write_f64(out, cfg.recurrent_dropout);
    write_u64(out, cfg.seed);
    const auto& lemmas = model.vocab().lemmas();
    write_u64(out, lemmas.size());
    for (const auto& lemma : lemmas) {
        write_u64(out, lemma.size());
        out.write(lemma.data(), std::streamsize(lemma.size()));
    }
    write_u64(out, model.param_count());
    for (double v : model.params()) {
        write_f64(out, v);
    }
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

LstmModel load_lstm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    char magic[8];
    in.read(magic, 8);
    if (!in) {
        throw FormatError("'" + path + "' is too short to be a model file");
    }
    if (std::memcmp(magic, kMagic, 6) != 0) {
        throw FormatError("'" + path + "' is not a sequence-model file");
    }
    if (std::memcmp(magic, kMagic, 8) != 0) {
        throw VersionError("'" + path + "' uses unsupported container version '" +
                           std::string(magic + 6, 2) + "'");
    }

    LstmModel model;
    model.config_.units = read_u64(in);
    model.config_.embed_dim = read_u64(in);
    model.config_.seq_len = read_u64(in);
    model.config_.dropout = read_f64(in);
    model.config_.recurrent_dropout = read_f64(in);
    model.config_.seed = read_u64(in);
    const std::uint64_t vocab_n = read_u64(in);
    if (!in) {
        throw FormatError("'" + path + "' has a truncated header");
    }
    for (std::uint64_t i = 0; i < vocab_n; ++i) {
        const std::uint64_t len = read_u64(in);
        if (!in || len > (1u << 20)) {
            throw FormatError("'" + path + "' has a corrupt vocabulary entry");
        }
        std::string lemma(len, '\0');
        in.read(lemma.data(), std::streamsize(len));
        model.vocab_.add(lemma);
    }
    const std::uint64_t param_n = read_u64(in);
    const Layout l = layout_of(model.vocab_.size(), model.config_);
    if (param_n != l.total) {
        throw FormatError("'" + path + "' declares " + std::to_string(param_n) +
                          " parameters but the stored shape needs " + std::to_string(l.total));
    }
    model.params_.resize(param_n);
    for (auto& v : model.params_) {
        v = read_f64(in);
    }
    if (!in) {
        throw FormatError("'" + path + "' has truncated parameter data");
    }
    return model;
}

} // namespace winoreg
