#include "har/convnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "har/csv.hpp"

namespace har {

namespace {

constexpr double kStdFloor = 1e-8;

// Portable uniform double in [0, 1): 53 top bits of the generator output.
double next_unit(std::uint64_t raw) { return static_cast<double>(raw >> 11) * 0x1.0p-53; }

struct LayerShape {
    int in_channels = 0;
    int in_length = 0;
    int conv_length = 0;    // after valid convolution
    int pooled_length = 0;  // after max pooling (remainder truncated)
};

struct NetShapes {
    std::vector<LayerShape> blocks;
    int flat_dim = 0;
};

NetShapes compute_shapes(const NetConfig& config) {
    if (config.input_length < 1 || config.channels_in < 1 || config.classes < 1 ||
        config.dense_hidden < 1)
        throw std::invalid_argument("convnet: invalid config sizes");
    NetShapes shapes;
    int channels = config.channels_in;
    int length = config.input_length;
    for (const auto& block : config.conv_blocks) {
        if (block.filters < 1 || block.kernel < 1 || block.pool < 1)
            throw std::invalid_argument("convnet: invalid conv block");
        LayerShape s;
        s.in_channels = channels;
        s.in_length = length;
        s.conv_length = length - block.kernel + 1;
        if (s.conv_length < 1)
            throw std::invalid_argument("convnet: kernel longer than running length");
        s.pooled_length = s.conv_length / block.pool;
        if (s.pooled_length < 1)
            throw std::invalid_argument("convnet: pooling wipes out the running length");
        shapes.blocks.push_back(s);
        channels = block.filters;
        length = s.pooled_length;
    }
    shapes.flat_dim = channels * length;
    return shapes;
}

}  // namespace

NetConfig NetConfig::reference(int input_length, int classes) {
    NetConfig c;
    c.input_length = input_length;
    c.conv_blocks = {{16, 5, 2}, {32, 5, 2}};
    c.dense_hidden = 64;
    c.classes = classes;
    c.learning_rate = 0.01;
    c.epochs = 50;
    c.batch_size = 32;
    return c;
}

std::size_t NetParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : conv) n += layer.w.size() + layer.b.size();
    n += hidden.w.size() + hidden.b.size();
    n += output.w.size() + output.b.size();
    return n;
}

std::vector<double*> NetParams::parameter_views() {
    std::vector<double*> views;
    views.reserve(parameter_count());
    for (auto& layer : conv) {
        for (double& v : layer.w) views.push_back(&v);
        for (double& v : layer.b) views.push_back(&v);
    }
    for (double& v : hidden.w) views.push_back(&v);
    for (double& v : hidden.b) views.push_back(&v);
    for (double& v : output.w) views.push_back(&v);
    for (double& v : output.b) views.push_back(&v);
    return views;
}

NetParams init_net(const NetConfig& config, std::uint64_t seed) {
    const NetShapes shapes = compute_shapes(config);
    std::mt19937_64 rng(seed);
    auto uniform_signed = [&rng](double bound) {
        return (2.0 * next_unit(rng()) - 1.0) * bound;
    };

    NetParams params;
    for (std::size_t b = 0; b < config.conv_blocks.size(); ++b) {
        const auto& spec = config.conv_blocks[b];
        const auto& shape = shapes.blocks[b];
        ConvLayerParams layer;
        layer.filters = spec.filters;
        layer.channels = shape.in_channels;
        layer.kernel = spec.kernel;
        const double bound = std::sqrt(6.0 / (shape.in_channels * spec.kernel));
        layer.w.resize(static_cast<std::size_t>(spec.filters) * shape.in_channels * spec.kernel);
        for (double& v : layer.w) v = uniform_signed(bound);
        layer.b.assign(static_cast<std::size_t>(spec.filters), 0.0);
        params.conv.push_back(std::move(layer));
    }

    params.hidden.out_dim = config.dense_hidden;
    params.hidden.in_dim = shapes.flat_dim;
    {
        const double bound = std::sqrt(6.0 / shapes.flat_dim);
        params.hidden.w.resize(static_cast<std::size_t>(config.dense_hidden) * shapes.flat_dim);
        for (double& v : params.hidden.w) v = uniform_signed(bound);
        params.hidden.b.assign(static_cast<std::size_t>(config.dense_hidden), 0.0);
    }
    params.output.out_dim = config.classes;
    params.output.in_dim = config.dense_hidden;
    {
        const double bound = std::sqrt(6.0 / config.dense_hidden);
        params.output.w.resize(static_cast<std::size_t>(config.classes) * config.dense_hidden);
        for (double& v : params.output.w) v = uniform_signed(bound);
        params.output.b.assign(static_cast<std::size_t>(config.classes), 0.0);
    }
    return params;
}

namespace {

void check_params_match(const NetConfig& config, const NetShapes& shapes,
                        const NetParams& params) {
    if (params.conv.size() != config.conv_blocks.size())
        throw std::invalid_argument("convnet: parameter/config conv layer count mismatch");
    for (std::size_t b = 0; b < params.conv.size(); ++b) {
        const auto& layer = params.conv[b];
        const auto& spec = config.conv_blocks[b];
        const auto& shape = shapes.blocks[b];
        if (layer.filters != spec.filters || layer.kernel != spec.kernel ||
            layer.channels != shape.in_channels ||
            layer.w.size() != static_cast<std::size_t>(spec.filters) * shape.in_channels *
                                  spec.kernel ||
            layer.b.size() != static_cast<std::size_t>(spec.filters))
            throw std::invalid_argument("convnet: parameter/config conv shape mismatch");
    }
    if (params.hidden.in_dim != shapes.flat_dim || params.hidden.out_dim != config.dense_hidden ||
        params.output.in_dim != config.dense_hidden || params.output.out_dim != config.classes)
        throw std::invalid_argument("convnet: parameter/config dense shape mismatch");
}

// Activations of one sample kept for the backward pass.
struct ForwardState {
    std::vector<double> input;                     // standardized, [channel][t]
    std::vector<std::vector<double>> conv_pre;     // per block, pre-ReLU
    std::vector<std::vector<double>> pooled;       // per block, post pool
    std::vector<std::vector<int>> pool_argmax;     // per block, winner index
    std::vector<double> hidden_pre;
    std::vector<double> hidden_act;
    std::vector<double> logits;
    std::vector<double> probs;
};

void standardize_input(const NetConfig& config, const NetParams& params,
                       const LabeledWindow& window, std::vector<double>& out) {
    const int length = config.input_length;
    if (static_cast<int>(window.samples.size()) != length)
        throw std::invalid_argument("convnet: window length does not match input_length");
    out.resize(static_cast<std::size_t>(3) * length);
    for (int t = 0; t < length; ++t) {
        const AccelSample& s = window.samples[static_cast<std::size_t>(t)];
        out[0 * length + t] = (s.x - params.input_mean[0]) / params.input_std[0];
        out[1 * length + t] = (s.y - params.input_mean[1]) / params.input_std[1];
        out[2 * length + t] = (s.z - params.input_mean[2]) / params.input_std[2];
    }
}

void forward(const NetConfig& config, const NetShapes& shapes, const NetParams& params,
             const LabeledWindow& window, ForwardState& state) {
    standardize_input(config, params, window, state.input);

    state.conv_pre.resize(params.conv.size());
    state.pooled.resize(params.conv.size());
    state.pool_argmax.resize(params.conv.size());

    const std::vector<double>* current = &state.input;
    for (std::size_t b = 0; b < params.conv.size(); ++b) {
        const ConvLayerParams& layer = params.conv[b];
        const LayerShape& shape = shapes.blocks[b];
        const int pool = config.conv_blocks[b].pool;
        auto& pre = state.conv_pre[b];
        auto& pooled = state.pooled[b];
        auto& argmax = state.pool_argmax[b];
        pre.assign(static_cast<std::size_t>(layer.filters) * shape.conv_length, 0.0);
        pooled.assign(static_cast<std::size_t>(layer.filters) * shape.pooled_length, 0.0);
        argmax.assign(pooled.size(), 0);

        for (int f = 0; f < layer.filters; ++f) {
            for (int t = 0; t < shape.conv_length; ++t) {
                double acc = layer.b[static_cast<std::size_t>(f)];
                for (int c = 0; c < layer.channels; ++c) {
                    const double* in_row = current->data() + static_cast<std::size_t>(c) * shape.in_length;
                    const double* w_row = layer.w.data() +
                                          (static_cast<std::size_t>(f) * layer.channels + c) *
                                              layer.kernel;
                    for (int k = 0; k < layer.kernel; ++k) acc += w_row[k] * in_row[t + k];
                }
                pre[static_cast<std::size_t>(f) * shape.conv_length + t] = acc;
            }
            for (int u = 0; u < shape.pooled_length; ++u) {
                int best_t = u * pool;
                double best = pre[static_cast<std::size_t>(f) * shape.conv_length + best_t];
                for (int k = 1; k < pool; ++k) {
                    const int t = u * pool + k;
                    const double v = pre[static_cast<std::size_t>(f) * shape.conv_length + t];
                    if (v > best) {
                        best = v;
                        best_t = t;
                    }
                }
                // ReLU after pooling of pre-activations is equivalent to
                // pool(relu(x)) only if max(x) decides; keep relu before pool.
                const double activated = std::max(best, 0.0);
                pooled[static_cast<std::size_t>(f) * shape.pooled_length + u] = activated;
                argmax[static_cast<std::size_t>(f) * shape.pooled_length + u] = best_t;
            }
        }
        current = &pooled;
    }

    const std::vector<double>& flat = params.conv.empty() ? state.input : state.pooled.back();
    state.hidden_pre.assign(static_cast<std::size_t>(params.hidden.out_dim), 0.0);
    state.hidden_act.assign(static_cast<std::size_t>(params.hidden.out_dim), 0.0);
    for (int o = 0; o < params.hidden.out_dim; ++o) {
        double acc = params.hidden.b[static_cast<std::size_t>(o)];
        const double* w_row = params.hidden.w.data() +
                              static_cast<std::size_t>(o) * params.hidden.in_dim;
        for (int i = 0; i < params.hidden.in_dim; ++i) acc += w_row[i] * flat[static_cast<std::size_t>(i)];
        state.hidden_pre[static_cast<std::size_t>(o)] = acc;
        state.hidden_act[static_cast<std::size_t>(o)] = std::max(acc, 0.0);
    }

    state.logits.assign(static_cast<std::size_t>(params.output.out_dim), 0.0);
    for (int o = 0; o < params.output.out_dim; ++o) {
        double acc = params.output.b[static_cast<std::size_t>(o)];
        const double* w_row = params.output.w.data() +
                              static_cast<std::size_t>(o) * params.output.in_dim;
        for (int i = 0; i < params.output.in_dim; ++i)
            acc += w_row[i] * state.hidden_act[static_cast<std::size_t>(i)];
        state.logits[static_cast<std::size_t>(o)] = acc;
    }

    state.probs.assign(state.logits.size(), 0.0);
    const double max_logit = *std::max_element(state.logits.begin(), state.logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < state.logits.size(); ++i) {
        state.probs[i] = std::exp(state.logits[i] - max_logit);
        sum += state.probs[i];
    }
    for (double& p : state.probs) p /= sum;
}

// Gradient buffers mirror NetParams tensor shapes.
NetParams zero_like(const NetParams& params) {
    NetParams grads = params;
    for (auto& layer : grads.conv) {
        std::fill(layer.w.begin(), layer.w.end(), 0.0);
        std::fill(layer.b.begin(), layer.b.end(), 0.0);
    }
    std::fill(grads.hidden.w.begin(), grads.hidden.w.end(), 0.0);
    std::fill(grads.hidden.b.begin(), grads.hidden.b.end(), 0.0);
    std::fill(grads.output.w.begin(), grads.output.w.end(), 0.0);
    std::fill(grads.output.b.begin(), grads.output.b.end(), 0.0);
    return grads;
}

// Accumulates d(loss for this sample)/d(params) into grads.
void backward(const NetShapes& shapes, const NetParams& params, const ForwardState& state,
              int label, NetParams& grads) {
    const std::size_t n_classes = state.probs.size();
    std::vector<double> d_logits(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        d_logits[c] = state.probs[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
    }

    const std::vector<double>& flat = params.conv.empty() ? state.input : state.pooled.back();

    std::vector<double> d_hidden_act(static_cast<std::size_t>(params.hidden.out_dim), 0.0);
    for (int o = 0; o < params.output.out_dim; ++o) {
        const double d = d_logits[static_cast<std::size_t>(o)];
        double* gw_row = grads.output.w.data() + static_cast<std::size_t>(o) * params.output.in_dim;
        const double* w_row = params.output.w.data() +
                              static_cast<std::size_t>(o) * params.output.in_dim;
        for (int i = 0; i < params.output.in_dim; ++i) {
            gw_row[i] += d * state.hidden_act[static_cast<std::size_t>(i)];
            d_hidden_act[static_cast<std::size_t>(i)] += d * w_row[i];
        }
        grads.output.b[static_cast<std::size_t>(o)] += d;
    }

    std::vector<double> d_flat(static_cast<std::size_t>(params.hidden.in_dim), 0.0);
    for (int o = 0; o < params.hidden.out_dim; ++o) {
        const double relu_gate = state.hidden_pre[static_cast<std::size_t>(o)] > 0.0 ? 1.0 : 0.0;
        const double d = d_hidden_act[static_cast<std::size_t>(o)] * relu_gate;
        double* gw_row = grads.hidden.w.data() + static_cast<std::size_t>(o) * params.hidden.in_dim;
        const double* w_row = params.hidden.w.data() +
                              static_cast<std::size_t>(o) * params.hidden.in_dim;
        for (int i = 0; i < params.hidden.in_dim; ++i) {
            gw_row[i] += d * flat[static_cast<std::size_t>(i)];
            d_flat[static_cast<std::size_t>(i)] += d * w_row[i];
        }
        grads.hidden.b[static_cast<std::size_t>(o)] += d;
    }

    // Walk the conv blocks backwards, routing gradients through pool winners
    // and the ReLU gate on the winning pre-activation.
    std::vector<double> d_out = std::move(d_flat);
    for (std::size_t b = params.conv.size(); b-- > 0;) {
        const ConvLayerParams& layer = params.conv[b];
        const LayerShape& shape = shapes.blocks[b];
        ConvLayerParams& glayer = grads.conv[b];
        const std::vector<double>& input = b == 0 ? state.input : state.pooled[b - 1];
        const auto& pre = state.conv_pre[b];
        const auto& argmax = state.pool_argmax[b];

        std::vector<double> d_pre(static_cast<std::size_t>(layer.filters) * shape.conv_length,
                                  0.0);
        for (int f = 0; f < layer.filters; ++f) {
            for (int u = 0; u < shape.pooled_length; ++u) {
                const std::size_t pooled_idx =
                    static_cast<std::size_t>(f) * shape.pooled_length + u;
                const int winner = argmax[pooled_idx];
                const double z = pre[static_cast<std::size_t>(f) * shape.conv_length + winner];
                if (z > 0.0) {
                    d_pre[static_cast<std::size_t>(f) * shape.conv_length + winner] +=
                        d_out[pooled_idx];
                }
            }
        }

        std::vector<double> d_in(static_cast<std::size_t>(layer.channels) * shape.in_length, 0.0);
        for (int f = 0; f < layer.filters; ++f) {
            for (int t = 0; t < shape.conv_length; ++t) {
                const double d = d_pre[static_cast<std::size_t>(f) * shape.conv_length + t];
                if (d == 0.0) continue;
                glayer.b[static_cast<std::size_t>(f)] += d;
                for (int c = 0; c < layer.channels; ++c) {
                    const double* in_row = input.data() + static_cast<std::size_t>(c) * shape.in_length;
                    double* gw_row = glayer.w.data() +
                                     (static_cast<std::size_t>(f) * layer.channels + c) *
                                         layer.kernel;
                    const double* w_row = layer.w.data() +
                                          (static_cast<std::size_t>(f) * layer.channels + c) *
                                              layer.kernel;
                    double* din_row = d_in.data() + static_cast<std::size_t>(c) * shape.in_length;
                    for (int k = 0; k < layer.kernel; ++k) {
                        gw_row[k] += d * in_row[t + k];
                        din_row[t + k] += d * w_row[k];
                    }
                }
            }
        }
        d_out = std::move(d_in);
    }
}

double sample_loss(const ForwardState& state, int label) {
    const double p = std::max(state.probs[static_cast<std::size_t>(label)], 1e-300);
    return -std::log(p);
}

void check_labels(const NetConfig& config, const std::vector<NetSample>& samples) {
    for (const auto& s : samples) {
        if (s.window == nullptr) throw std::invalid_argument("convnet: null window");
        if (s.label < 0 || s.label >= config.classes)
            throw std::invalid_argument("convnet: label outside class range");
    }
}

}  // namespace

double batch_loss(const NetConfig& config, const NetParams& params,
                  const std::vector<NetSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
    check_labels(config, batch);
    const NetShapes shapes = compute_shapes(config);
    check_params_match(config, shapes, params);
    ForwardState state;
    double total = 0.0;
    for (const auto& sample : batch) {
        forward(config, shapes, params, *sample.window, state);
        total += sample_loss(state, sample.label);
    }
    return total / static_cast<double>(batch.size());
}

std::vector<double> batch_gradient(const NetConfig& config, const NetParams& params,
                                   const std::vector<NetSample>& batch, double* loss_out) {
    if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
    check_labels(config, batch);
    const NetShapes shapes = compute_shapes(config);
    check_params_match(config, shapes, params);
    NetParams grads = zero_like(params);
    ForwardState state;
    double total = 0.0;
    for (const auto& sample : batch) {
        forward(config, shapes, params, *sample.window, state);
        total += sample_loss(state, sample.label);
        backward(shapes, params, state, sample.label, grads);
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    std::vector<double> flat;
    flat.reserve(grads.parameter_count());
    for (double* v : grads.parameter_views()) flat.push_back(*v * inv);
    if (loss_out) *loss_out = total * inv;
    return flat;
}

NetParams train_net(const NetConfig& config, const std::vector<NetSample>& train,
                    const EpochObserver& observer) {
    if (train.empty()) throw std::invalid_argument("train_net: no training samples");
    if (config.batch_size < 1) throw std::invalid_argument("train_net: batch_size must be >= 1");
    if (config.epochs < 0) throw std::invalid_argument("train_net: negative epochs");
    check_labels(config, train);
    const NetShapes shapes = compute_shapes(config);

    NetParams params = init_net(config, config.seed);

    // Per-channel standardization fitted on the training windows.
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::array<double, 3> sq{0.0, 0.0, 0.0};
    std::size_t count = 0;
    for (const auto& sample : train) {
        if (static_cast<int>(sample.window->samples.size()) != config.input_length)
            throw std::invalid_argument("train_net: window length does not match input_length");
        for (const auto& a : sample.window->samples) {
            mean[0] += a.x;
            mean[1] += a.y;
            mean[2] += a.z;
            ++count;
        }
    }
    for (auto& m : mean) m /= static_cast<double>(count);
    for (const auto& sample : train) {
        for (const auto& a : sample.window->samples) {
            sq[0] += (a.x - mean[0]) * (a.x - mean[0]);
            sq[1] += (a.y - mean[1]) * (a.y - mean[1]);
            sq[2] += (a.z - mean[2]) * (a.z - mean[2]);
        }
    }
    for (int c = 0; c < 3; ++c) {
        params.input_mean[static_cast<std::size_t>(c)] = mean[static_cast<std::size_t>(c)];
        params.input_std[static_cast<std::size_t>(c)] =
            std::max(std::sqrt(sq[static_cast<std::size_t>(c)] / static_cast<double>(count)),
                     kStdFloor);
    }

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto views = params.parameter_views();
    ForwardState state;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates with our own stream; std::shuffle is not portable.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(order[i - 1], order[j]);
        }

        double epoch_loss = 0.0;
        std::size_t epoch_correct = 0;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end =
                std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
            NetParams grads = zero_like(params);
            double batch_total = 0.0;
            for (std::size_t pos = begin; pos < end; ++pos) {
                const NetSample& sample = train[order[pos]];
                forward(config, shapes, params, *sample.window, state);
                batch_total += sample_loss(state, sample.label);
                const int predicted = static_cast<int>(
                    std::max_element(state.probs.begin(), state.probs.end()) -
                    state.probs.begin());
                if (predicted == sample.label) ++epoch_correct;
                backward(shapes, params, state, sample.label, grads);
            }
            const double batch_n = static_cast<double>(end - begin);
            if (!std::isfinite(batch_total))
                throw std::runtime_error("train_net: non-finite loss at epoch " +
                                         std::to_string(epoch + 1));
            epoch_loss += batch_total;

            const double step = config.learning_rate / batch_n;
            auto grad_views = grads.parameter_views();
            for (std::size_t i = 0; i < views.size(); ++i) *views[i] -= step * *grad_views[i];
        }

        if (observer) {
            EpochStats stats;
            stats.epoch = epoch + 1;
            stats.loss = epoch_loss / static_cast<double>(train.size());
            stats.train_accuracy =
                static_cast<double>(epoch_correct) / static_cast<double>(train.size());
            observer(stats);
        }
    }
    return params;
}

std::string epoch_log_csv(const std::vector<EpochStats>& log) {
    std::ostringstream out;
    out << "epoch,loss,train_accuracy\n";
    for (const auto& stats : log) {
        out << stats.epoch << ',' << csv::format_double(stats.loss) << ','
            << csv::format_double(stats.train_accuracy) << '\n';
    }
    return out.str();
}

NetPrediction predict(const NetConfig& config, const NetParams& params,
                      const LabeledWindow& window) {
    const NetShapes shapes = compute_shapes(config);
    check_params_match(config, shapes, params);
    ForwardState state;
    forward(config, shapes, params, window, state);
    NetPrediction p;
    p.probabilities = state.probs;
    p.label = static_cast<int>(std::max_element(state.probs.begin(), state.probs.end()) -
                               state.probs.begin());
    return p;
}

double gradient_check(const NetConfig& config, const NetParams& params,
                      const std::vector<NetSample>& batch, double eps, int corrupt_index) {
    std::vector<double> analytic = batch_gradient(config, params, batch);
    if (corrupt_index >= 0) {
        if (static_cast<std::size_t>(corrupt_index) >= analytic.size())
            throw std::invalid_argument("gradient_check: corrupt_index out of range");
        analytic[static_cast<std::size_t>(corrupt_index)] += 1.0;
    }

    NetParams probe = params;
    auto views = probe.parameter_views();
    double worst = 0.0;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const double original = *views[i];
        *views[i] = original + eps;
        const double up = batch_loss(config, probe, batch);
        *views[i] = original - eps;
        const double down = batch_loss(config, probe, batch);
        *views[i] = original;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-12);
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

std::string params_to_text(const NetParams& params) {
    std::ostringstream out;
    out << "conv_layers " << params.conv.size() << '\n';
    auto dump = [&out](const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ' ';
            out << csv::format_double(values[i]);
        }
        out << '\n';
    };
    for (const auto& layer : params.conv) {
        out << "conv " << layer.filters << ' ' << layer.channels << ' ' << layer.kernel << '\n';
        dump(layer.w);
        dump(layer.b);
    }
    out << "dense " << params.hidden.out_dim << ' ' << params.hidden.in_dim << '\n';
    dump(params.hidden.w);
    dump(params.hidden.b);
    out << "dense " << params.output.out_dim << ' ' << params.output.in_dim << '\n';
    dump(params.output.w);
    dump(params.output.b);
    out << "input_norm\n";
    dump({params.input_mean[0], params.input_mean[1], params.input_mean[2]});
    dump({params.input_std[0], params.input_std[1], params.input_std[2]});
    return out.str();
}

NetParams params_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string keyword;
    auto read_values = [&in](std::vector<double>& values) {
        std::string line;
        std::getline(in >> std::ws, line);
        std::istringstream row(line);
        std::string field;
        std::size_t i = 0;
        while (row >> field) {
            if (i >= values.size()) throw std::runtime_error("params_from_text: too many values");
            values[i++] = csv::parse_double(field, "params_from_text");
        }
        if (i != values.size()) throw std::runtime_error("params_from_text: too few values");
    };

    NetParams params;
    std::size_t n_conv = 0;
    if (!(in >> keyword >> n_conv) || keyword != "conv_layers")
        throw std::runtime_error("params_from_text: bad manifest");
    for (std::size_t b = 0; b < n_conv; ++b) {
        ConvLayerParams layer;
        if (!(in >> keyword >> layer.filters >> layer.channels >> layer.kernel) ||
            keyword != "conv")
            throw std::runtime_error("params_from_text: bad conv manifest");
        layer.w.resize(static_cast<std::size_t>(layer.filters) * layer.channels * layer.kernel);
        layer.b.resize(static_cast<std::size_t>(layer.filters));
        read_values(layer.w);
        read_values(layer.b);
        params.conv.push_back(std::move(layer));
    }
    auto read_dense = [&](DenseLayerParams& dense) {
        if (!(in >> keyword >> dense.out_dim >> dense.in_dim) || keyword != "dense")
            throw std::runtime_error("params_from_text: bad dense manifest");
        dense.w.resize(static_cast<std::size_t>(dense.out_dim) * dense.in_dim);
        dense.b.resize(static_cast<std::size_t>(dense.out_dim));
        read_values(dense.w);
        read_values(dense.b);
    };
    read_dense(params.hidden);
    read_dense(params.output);
    if (!(in >> keyword) || keyword != "input_norm")
        throw std::runtime_error("params_from_text: bad norm manifest");
    std::vector<double> norm(3);
    read_values(norm);
    std::copy(norm.begin(), norm.end(), params.input_mean.begin());
    read_values(norm);
    std::copy(norm.begin(), norm.end(), params.input_std.begin());
    return params;
}

}  // namespace har
