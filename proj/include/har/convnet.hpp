#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "har/datasets.hpp"

namespace har {

// 1-D convnet over raw tri-axial windows. All convolutions are valid
// (no padding); max pooling truncates any remainder.
struct ConvBlockSpec {
    int filters = 0;
    int kernel = 0;
    int pool = 1;
};

struct NetConfig {
    int input_length = 0;
    int channels_in = 3;
    std::vector<ConvBlockSpec> conv_blocks;
    int dense_hidden = 64;
    int classes = 0;
    double learning_rate = 0.01;
    int epochs = 50;
    int batch_size = 32;
    std::uint64_t seed = 0;

    // conv(16,k5) -> relu -> pool2 -> conv(32,k5) -> relu -> pool2
    // -> dense 64 -> relu -> dense C -> softmax, lr 0.01, batch 32, 50 epochs.
    static NetConfig reference(int input_length, int classes);
};

struct ConvLayerParams {
    int filters = 0;
    int channels = 0;
    int kernel = 0;
    std::vector<double> w;  // [filter][channel][tap]
    std::vector<double> b;  // [filter]
};

struct DenseLayerParams {
    int out_dim = 0;
    int in_dim = 0;
    std::vector<double> w;  // [out][in]
    std::vector<double> b;  // [out]
};

struct NetParams {
    std::vector<ConvLayerParams> conv;
    DenseLayerParams hidden;
    DenseLayerParams output;
    // Per-channel input standardization fitted on the training set.
    std::array<double, 3> input_mean{0.0, 0.0, 0.0};
    std::array<double, 3> input_std{1.0, 1.0, 1.0};

    std::size_t parameter_count() const;
    // Mutable views over every weight/bias, in a fixed order.
    std::vector<double*> parameter_views();
};

struct EpochStats {
    int epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
};
using EpochObserver = std::function<void(const EpochStats&)>;

// Training log as CSV: epoch,loss,train_accuracy.
std::string epoch_log_csv(const std::vector<EpochStats>& log);

// He-style uniform init: weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)),
// biases 0, deterministic per seed (own generator, no library
// distributions, so the stream is identical across platforms).
NetParams init_net(const NetConfig& config, std::uint64_t seed);

// A labeled sample the net consumes: standardization not yet applied.
struct NetSample {
    const LabeledWindow* window = nullptr;
    int label = 0;  // index into the experiment's label set
};

// Mini-batch gradient descent on softmax cross-entropy. Batch order is
// reshuffled every epoch from config.seed; gradients are averaged within a
// batch in sample order, so training is bit-reproducible for identical
// inputs. Throws on shape mismatch or a non-finite loss.
NetParams train_net(const NetConfig& config, const std::vector<NetSample>& train,
                    const EpochObserver& observer = nullptr);

struct NetPrediction {
    int label = 0;
    std::vector<double> probabilities;
};

// Softmax probabilities plus the argmax label (ties to the lowest index).
NetPrediction predict(const NetConfig& config, const NetParams& params,
                      const LabeledWindow& window);

// Mean cross-entropy over the batch and its analytic gradient with respect
// to every parameter, laid out as in NetParams::parameter_views().
double batch_loss(const NetConfig& config, const NetParams& params,
                  const std::vector<NetSample>& batch);
std::vector<double> batch_gradient(const NetConfig& config, const NetParams& params,
                                   const std::vector<NetSample>& batch, double* loss_out = nullptr);

// Central-finite-difference verification of batch_gradient. Returns
// max_i |analytic_i - numeric_i| / max(|analytic_i| + |numeric_i|, 1e-12).
// corrupt_index >= 0 perturbs that analytic entry by +1 first (fault
// injection used by the verification tests).
double gradient_check(const NetConfig& config, const NetParams& params,
                      const std::vector<NetSample>& batch, double eps, int corrupt_index = -1);

// Text checkpoint: shape manifest followed by the flat tensor values as
// shortest round-trip decimals.
std::string params_to_text(const NetParams& params);
NetParams params_from_text(const std::string& text);

}  // namespace har
