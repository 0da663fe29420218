#include "har/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "har/csv.hpp"

namespace har {

PriorWeights::PriorWeights(std::vector<double> raw) : weights_(std::move(raw)) {
    if (weights_.empty()) throw std::invalid_argument("PriorWeights: empty");
    for (double& w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("PriorWeights: weights must be finite and >= 0");
        w = std::max(w, kFloor);
    }
    double sum = 0.0;
    for (double w : weights_) sum += w;
    for (double& w : weights_) w /= sum;
}

PriorWeights PriorWeights::uniform(std::size_t n) {
    return PriorWeights(std::vector<double>(n, 1.0));
}

std::string BoostModel::to_text() const {
    std::ostringstream out;
    for (std::size_t t = 0; t < rounds.size(); ++t) {
        const BoostRound& r = rounds[t];
        out << (t + 1) << ',' << csv::format_double(r.alpha) << ',' << r.stump.feature_index
            << ',' << csv::format_double(r.stump.threshold) << ','
            << label_set[static_cast<std::size_t>(r.stump.left_label)] << ','
            << label_set[static_cast<std::size_t>(r.stump.right_label)] << '\n';
    }
    return out.str();
}

namespace {

// Weighted 0-1 error of a stump, summed in ascending sample order. Every
// error that decides a comparison is computed by this one expression, so
// exact ties resolve identically here and in any straightforward oracle.
double canonical_error(const std::vector<std::vector<double>>& features,
                       const std::vector<int>& labels, const std::vector<double>& weights,
                       const Stump& stump) {
    double err = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (stump.predict(features[i]) != labels[i]) err += weights[i];
    }
    return err;
}

int weighted_majority(const std::vector<int>& labels, const std::vector<double>& weights,
                      int n_labels) {
    std::vector<double> mass(static_cast<std::size_t>(n_labels), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i)
        mass[static_cast<std::size_t>(labels[i])] += weights[i];
    return static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin());
}

// Sample order per feature, sorted by (value, index); computed once per
// training run since feature values never change across rounds.
std::vector<std::vector<std::size_t>> feature_orders(
    const std::vector<std::vector<double>>& features) {
    const std::size_t n = features.size();
    const std::size_t k = features.front().size();
    std::vector<std::vector<std::size_t>> orders(k);
    for (std::size_t f = 0; f < k; ++f) {
        auto& order = orders[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (features[a][f] != features[b][f]) return features[a][f] < features[b][f];
            return a < b;
        });
    }
    return orders;
}

Stump best_stump_ordered(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& labels, const std::vector<double>& weights,
                         int n_labels, const std::vector<std::vector<std::size_t>>& orders) {
    const std::size_t n = features.size();
    const std::size_t k = features.front().size();
    const std::size_t nl = static_cast<std::size_t>(n_labels);

    // Loose margin covering accumulation differences between the running
    // class sums and the canonical per-sample sums; candidates outside it
    // are strictly worse and are skipped without recomputation.
    constexpr double kRecheckSlack = 1e-9;

    bool have_best = false;
    Stump best;
    double best_error = 0.0;

    std::vector<double> left(nl), right(nl);
    std::vector<double> left_exact(nl), right_exact(nl);
    for (std::size_t f = 0; f < k; ++f) {
        std::fill(left.begin(), left.end(), 0.0);
        std::fill(right.begin(), right.end(), 0.0);
        double right_total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            right[static_cast<std::size_t>(labels[i])] += weights[i];
            right_total += weights[i];
        }
        double left_total = 0.0;

        const auto& order = orders[f];
        for (std::size_t pos = 0; pos + 1 <= n; ++pos) {
            const std::size_t idx = order[pos];
            const std::size_t lab = static_cast<std::size_t>(labels[idx]);
            left[lab] += weights[idx];
            left_total += weights[idx];
            right[lab] -= weights[idx];
            right_total -= weights[idx];
            if (pos + 1 == n) break;
            const double v0 = features[idx][f];
            const double v1 = features[order[pos + 1]][f];
            if (v0 == v1) continue;

            const std::size_t l_approx = static_cast<std::size_t>(
                std::max_element(left.begin(), left.end()) - left.begin());
            const std::size_t r_approx = static_cast<std::size_t>(
                std::max_element(right.begin(), right.end()) - right.begin());
            const double approx =
                (left_total - left[l_approx]) + (right_total - right[r_approx]);
            if (have_best && approx >= best_error + kRecheckSlack) continue;

            // Candidate survives the bound. The running sums drift from
            // exhaustive-scan arithmetic by an ulp (the right side is
            // maintained by subtraction), which is enough to break
            // equal-mass label ties differently, so the label pair is
            // settled the way an exhaustive scan settles it: per-sample
            // error sums over the near-optimal pairs, first strict minimum
            // in (left, right) order.
            const double threshold = 0.5 * (v0 + v1);
            std::fill(left_exact.begin(), left_exact.end(), 0.0);
            std::fill(right_exact.begin(), right_exact.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                auto& side = features[i][f] < threshold ? left_exact : right_exact;
                side[static_cast<std::size_t>(labels[i])] += weights[i];
            }
            double left_sum = 0.0, right_sum = 0.0;
            for (std::size_t c = 0; c < nl; ++c) {
                left_sum += left_exact[c];
                right_sum += right_exact[c];
            }
            double pair_bound = std::numeric_limits<double>::infinity();
            for (std::size_t lc = 0; lc < nl; ++lc) {
                for (std::size_t rc = 0; rc < nl; ++rc) {
                    pair_bound = std::min(pair_bound, (left_sum - left_exact[lc]) +
                                                          (right_sum - right_exact[rc]));
                }
            }

            bool have_pair = false;
            Stump candidate{static_cast<int>(f), threshold, 0, 0};
            double candidate_error = 0.0;
            for (std::size_t lc = 0; lc < nl; ++lc) {
                for (std::size_t rc = 0; rc < nl; ++rc) {
                    const double pair_approx =
                        (left_sum - left_exact[lc]) + (right_sum - right_exact[rc]);
                    if (pair_approx >= pair_bound + kRecheckSlack) continue;
                    const Stump probe{static_cast<int>(f), threshold, static_cast<int>(lc),
                                      static_cast<int>(rc)};
                    const double err = canonical_error(features, labels, weights, probe);
                    if (!have_pair || err < candidate_error) {
                        have_pair = true;
                        candidate = probe;
                        candidate_error = err;
                    }
                }
            }

            if (!have_best || candidate_error < best_error) {
                have_best = true;
                best = candidate;
                best_error = candidate_error;
                if (best_error == 0.0) return best;
            }
        }
    }

    if (!have_best) {
        // Every feature is constant: no split exists. Route everything to
        // the weighted majority label.
        const int majority = weighted_majority(labels, weights, n_labels);
        return Stump{0, features.front()[0], majority, majority};
    }
    return best;
}

void check_training_input(const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels, int n_labels) {
    if (features.empty()) throw std::invalid_argument("adaboost: no samples");
    if (features.size() != labels.size())
        throw std::invalid_argument("adaboost: features/labels size mismatch");
    const std::size_t dim = features.front().size();
    if (dim == 0) throw std::invalid_argument("adaboost: zero-dimensional features");
    for (const auto& row : features) {
        if (row.size() != dim) throw std::invalid_argument("adaboost: ragged feature matrix");
    }
    for (int label : labels) {
        if (label < 0 || label >= n_labels)
            throw std::invalid_argument("adaboost: label outside label set");
    }
}

}  // namespace

Stump best_stump(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
                 const std::vector<double>& weights, int n_labels) {
    check_training_input(features, labels, n_labels);
    if (weights.size() != features.size())
        throw std::invalid_argument("best_stump: weights/samples size mismatch");
    return best_stump_ordered(features, labels, weights, n_labels, feature_orders(features));
}

BoostModel train_adaboost(const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels,
                          const std::vector<std::string>& label_set, const PriorWeights& priors,
                          const AdaBoostConfig& config, const TrainObserver& observer) {
    const int n_labels = static_cast<int>(label_set.size());
    check_training_input(features, labels, n_labels);
    if (priors.size() != features.size())
        throw std::invalid_argument("train_adaboost: priors/samples size mismatch");
    if (config.rounds < 1) throw std::invalid_argument("train_adaboost: rounds must be >= 1");
    if (std::set<int>(labels.begin(), labels.end()).size() < 2)
        throw std::invalid_argument("train_adaboost: need at least 2 classes present");

    const auto orders = feature_orders(features);
    const double classes = static_cast<double>(n_labels);
    const double chance_error = 1.0 - 1.0 / classes;

    BoostModel model;
    model.label_set = label_set;
    std::vector<double> dist = priors.values();

    for (int t = 0; t < config.rounds; ++t) {
        const Stump stump = best_stump_ordered(features, labels, dist, n_labels, orders);
        const double eps = canonical_error(features, labels, dist, stump);

        RoundTrace trace;
        trace.round = t + 1;
        trace.weights = dist;
        trace.stump = stump;
        trace.weighted_error = eps;

        if (eps >= chance_error) {
            trace.kept = false;
            if (observer) observer(trace);
            break;
        }

        if (eps <= 1e-12) {
            trace.alpha = config.alpha_cap;
            trace.kept = true;
            if (observer) observer(trace);
            model.rounds.push_back({stump, config.alpha_cap, eps});
            break;
        }

        const double alpha = std::log((1.0 - eps) / eps) + std::log(classes - 1.0);
        trace.alpha = alpha;
        trace.kept = true;
        if (observer) observer(trace);
        model.rounds.push_back({stump, alpha, eps});

        const double boost = std::exp(alpha);
        double sum = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (stump.predict(features[i]) != labels[i]) dist[i] *= boost;
            sum += dist[i];
        }
        for (double& w : dist) w /= sum;
    }

    if (model.rounds.empty())
        throw std::runtime_error("train_adaboost: no weak learner beat chance level");
    return model;
}

int predict(const BoostModel& model, const std::vector<double>& x) {
    for (const auto& round : model.rounds) {
        if (static_cast<std::size_t>(round.stump.feature_index) >= x.size())
            throw std::invalid_argument("predict: feature dimension mismatch");
    }
    std::vector<double> votes(model.label_set.size(), 0.0);
    for (const auto& round : model.rounds) {
        votes[static_cast<std::size_t>(round.stump.predict(x))] += round.alpha;
    }
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace har
