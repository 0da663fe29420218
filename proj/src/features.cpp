#include "har/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace har {

namespace {

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v, double mean) {
    double sum = 0.0;
    for (double x : v) sum += (x - mean) * (x - mean);
    return std::sqrt(sum / static_cast<double>(v.size()));
}

// Linear-interpolation quantile at position q * (N - 1) of the sorted values.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

// Upward crossings of zero: transitions from below zero to at-or-above.
int upward_zero_crossings(const std::vector<double>& v) {
    int count = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i - 1] < 0.0 && v[i] >= 0.0) ++count;
    }
    return count;
}

double mean_abs_deviation(const std::vector<double>& v, double mean) {
    double sum = 0.0;
    for (double x : v) sum += std::abs(x - mean);
    return sum / static_cast<double>(v.size());
}

double correlation(const std::vector<double>& a, const std::vector<double>& b, double mean_a,
                   double mean_b) {
    // A constant axis (max == min) has correlation 0 by definition.
    auto [min_a, max_a] = std::minmax_element(a.begin(), a.end());
    auto [min_b, max_b] = std::minmax_element(b.begin(), b.end());
    if (*min_a == *max_a || *min_b == *max_b) return 0.0;
    double cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - mean_a) * (b[i] - mean_b);
    cov /= static_cast<double>(a.size());
    const double sa = population_std(a, mean_a);
    const double sb = population_std(b, mean_b);
    return cov / (sa * sb);
}

void append_axis_stats(std::vector<double>& out, const std::vector<double>& axis) {
    const double mean = mean_of(axis);
    std::vector<double> sorted = axis;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> centered(axis.size());
    for (std::size_t i = 0; i < axis.size(); ++i) centered[i] = axis[i] - mean;
    double energy = 0.0;
    for (double x : axis) energy += x * x;
    energy /= static_cast<double>(axis.size());

    out.push_back(mean);
    out.push_back(population_std(axis, mean));
    out.push_back(sorted.front());
    out.push_back(sorted.back());
    out.push_back(quantile_sorted(sorted, 0.5));
    out.push_back(quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25));
    out.push_back(static_cast<double>(upward_zero_crossings(centered)));
    out.push_back(energy);
}

}  // namespace

FeatureVector extract_features(const LabeledWindow& window) {
    if (window.samples.empty()) throw std::invalid_argument("extract_features: empty window");
    const std::size_t n = window.samples.size();
    std::vector<double> x(n), y(n), z(n), mag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const AccelSample& s = window.samples[i];
        x[i] = s.x;
        y[i] = s.y;
        z[i] = s.z;
        mag[i] = std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
    }

    FeatureVector f;
    f.spec_id = kWindowFeatureSpec;
    f.values.reserve(kWindowFeatureDim);
    append_axis_stats(f.values, x);
    append_axis_stats(f.values, y);
    append_axis_stats(f.values, z);

    const double mx = mean_of(x), my = mean_of(y), mz = mean_of(z);
    f.values.push_back(correlation(x, y, mx, my));
    f.values.push_back(correlation(x, z, mx, mz));
    f.values.push_back(correlation(y, z, my, mz));

    const double mmag = mean_of(mag);
    f.values.push_back(mmag);
    f.values.push_back(population_std(mag, mmag));

    f.values.push_back(mean_abs_deviation(x, mx));
    f.values.push_back(mean_abs_deviation(y, my));
    f.values.push_back(mean_abs_deviation(z, mz));
    return f;
}

FeatureVector subject_signature(const std::vector<const LabeledWindow*>& windows) {
    if (windows.empty()) throw std::invalid_argument("subject_signature: no windows");
    std::vector<FeatureVector> feats;
    feats.reserve(windows.size());
    for (const LabeledWindow* w : windows) feats.push_back(extract_features(*w));

    const std::size_t dim = feats.front().values.size();
    const double count = static_cast<double>(feats.size());
    FeatureVector sig;
    sig.spec_id = kSignatureSpec;
    sig.values.resize(2 * dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
        double sum = 0.0;
        for (const auto& f : feats) sum += f.values[d];
        sig.values[d] = sum / count;
    }
    for (std::size_t d = 0; d < dim; ++d) {
        double sum = 0.0;
        for (const auto& f : feats) {
            const double delta = f.values[d] - sig.values[d];
            sum += delta * delta;
        }
        sig.values[dim + d] = std::sqrt(sum / count);
    }
    return sig;
}

FeatureVector subject_signature(const std::vector<LabeledWindow>& windows) {
    std::vector<const LabeledWindow*> ptrs;
    ptrs.reserve(windows.size());
    for (const auto& w : windows) ptrs.push_back(&w);
    return subject_signature(ptrs);
}

FeatureVector physical_vector(const SubjectMeta& meta) {
    return FeatureVector{{static_cast<double>(meta.sex), static_cast<double>(meta.age),
                          meta.weight_kg, meta.height_cm},
                         kPhysicalSpec};
}

Standardizer fit_standardizer(const std::vector<FeatureVector>& vectors) {
    if (vectors.size() < 2)
        throw std::invalid_argument("fit_standardizer: need at least two vectors");
    const std::size_t dim = vectors.front().values.size();
    for (const auto& v : vectors) {
        if (v.values.size() != dim)
            throw std::invalid_argument("fit_standardizer: dimension mismatch");
    }

    Standardizer s;
    s.mean.resize(dim, 0.0);
    s.scale.resize(dim, 0.0);
    const double count = static_cast<double>(vectors.size());
    for (std::size_t d = 0; d < dim; ++d) {
        double sum = 0.0;
        for (const auto& v : vectors) sum += v.values[d];
        s.mean[d] = sum / count;
        double sq = 0.0;
        for (const auto& v : vectors) {
            const double delta = v.values[d] - s.mean[d];
            sq += delta * delta;
        }
        s.scale[d] = std::max(std::sqrt(sq / count), Standardizer::kEpsilon);
    }
    return s;
}

FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& v) {
    if (v.values.size() != s.mean.size())
        throw std::invalid_argument("apply_standardizer: dimension mismatch");
    FeatureVector out;
    out.spec_id = v.spec_id;
    out.values.resize(v.values.size());
    for (std::size_t d = 0; d < v.values.size(); ++d) {
        out.values[d] = (v.values[d] - s.mean[d]) / s.scale[d];
    }
    return out;
}

}  // namespace har
