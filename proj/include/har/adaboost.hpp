#pragma once

#include <functional>
#include <string>
#include <vector>

namespace har {

// Depth-1 weak learner: x[feature_index] < threshold predicts left_label,
// otherwise right_label. Labels are indices into the model's label set.
struct Stump {
    int feature_index = 0;
    double threshold = 0.0;
    int left_label = 0;
    int right_label = 0;

    int predict(const std::vector<double>& x) const {
        return x[static_cast<std::size_t>(feature_index)] < threshold ? left_label : right_label;
    }
};

// Per-sample prior distribution: floored at kFloor, normalized to sum 1.
// Construction throws on empty or negative input.
class PriorWeights {
public:
    static constexpr double kFloor = 1e-12;

    explicit PriorWeights(std::vector<double> raw);
    static PriorWeights uniform(std::size_t n);

    const std::vector<double>& values() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
};

struct BoostRound {
    Stump stump;
    double alpha = 0.0;
    double weighted_error = 0.0;
};

// Multiclass AdaBoost (SAMME) over stumps.
struct BoostModel {
    std::vector<BoostRound> rounds;
    std::vector<std::string> label_set;

    // One line per round: t,alpha,feature_index,threshold,left_label,right_label
    // with alpha/threshold as shortest round-trip decimals.
    std::string to_text() const;
};

struct AdaBoostConfig {
    int rounds = 100;
    double alpha_cap = 30.0;
};

// Snapshot handed to the training observer before the round's reweighting:
// the distribution the stump was fitted on, the chosen stump, and its
// weighted error. Used by oracle tests to replay each round.
struct RoundTrace {
    int round = 0;
    std::vector<double> weights;
    Stump stump;
    double weighted_error = 0.0;
    double alpha = 0.0;
    bool kept = false;
};
using TrainObserver = std::function<void(const RoundTrace&)>;

// The stump minimizing weighted 0-1 error over every
// (feature, midpoint threshold, left/right label) candidate.
// Candidates are scanned feature-index ascending, threshold ascending,
// labels in label-set order; the first minimum wins, which realizes the
// lowest-feature-then-lowest-threshold tie-break. If no feature has two
// distinct values there is no split; the fallback stump routes everything
// to the weighted majority label.
Stump best_stump(const std::vector<std::vector<double>>& features,
                 const std::vector<int>& labels, const std::vector<double>& weights,
                 int n_labels);

// SAMME with a non-uniform initial distribution D1 = priors. Per round:
// fit best_stump on Dt, eps = weighted error,
// alpha = ln((1-eps)/eps) + ln(C-1), multiply misclassified weights by
// e^alpha, renormalize. eps >= 1 - 1/C discards the round and stops;
// eps <= 1e-12 keeps the round with alpha capped at alpha_cap and stops.
// Throws if fewer than 2 classes are present, rounds < 1, or no round
// survives.
BoostModel train_adaboost(const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels,
                          const std::vector<std::string>& label_set, const PriorWeights& priors,
                          const AdaBoostConfig& config = {},
                          const TrainObserver& observer = nullptr);

// argmax over classes of the alpha-weighted stump votes; ties resolve to
// the earliest label in label-set order.
int predict(const BoostModel& model, const std::vector<double>& x);

}  // namespace har
