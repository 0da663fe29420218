#include "har/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace har {

namespace {

// Own uniform/normal streams: library distributions differ across standard
// libraries and would break seed reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    double normal(double mean, double stddev) {
        const double u1 = 1.0 - unit();  // (0, 1]
        const double u2 = unit();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

private:
    std::mt19937_64 gen_;
};

std::string padded_name(const std::string& prefix, int value, int width) {
    std::ostringstream out;
    out << prefix;
    std::string digits = std::to_string(value);
    for (int i = static_cast<int>(digits.size()); i < width; ++i) out << '0';
    out << digits;
    return out.str();
}

int digits_for(int count) {
    int width = 1;
    for (int v = count - 1; v >= 10; v /= 10) ++width;
    return width;
}

// Class templates are sinusoid mixtures whose frequencies separate classes
// only mildly; amplitude carries most of the class identity, so style
// clusters that rescale amplitude genuinely collide neighboring classes
// across clusters.
struct ClassStyle {
    double amplitude = 1.0;
    double phase = 0.0;
};

AccelSample template_sample(int class_index, const ClassStyle& style, double time) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double f1 = 2.0 + 0.15 * class_index;
    const double f2 = 4.1 + 0.2 * class_index;
    const double f3 = 6.3 + 0.1 * class_index;
    const double amp = style.amplitude * (0.6 + 0.35 * class_index);
    auto axis = [&](double axis_phase) {
        return amp * (std::sin(two_pi * f1 * time + style.phase + axis_phase) +
                      0.5 * std::sin(two_pi * f2 * time + 1.3 * axis_phase) +
                      0.25 * std::sin(two_pi * f3 * time + style.phase));
    };
    return {axis(0.0), axis(two_pi / 3.0), axis(2.0 * two_pi / 3.0)};
}

}  // namespace

DatasetBundle generate_population(const PopulationSpec& spec) {
    if (spec.n_subjects < 1 || spec.n_classes < 1 || spec.windows_per_class < 1 ||
        spec.window_length < 1 || spec.n_style_clusters < 1)
        throw std::invalid_argument("generate_population: counts must be positive");
    if (spec.rate_hz <= 0.0)
        throw std::invalid_argument("generate_population: rate must be positive");
    if (spec.inter_subject_scale < 0.0 || spec.intra_subject_scale < 0.0)
        throw std::invalid_argument("generate_population: scales must be >= 0");

    Rng rng(spec.seed);

    // Style of each (cluster, class): clusters spread symmetrically around
    // the base template, scaled by inter_subject_scale.
    std::vector<std::vector<ClassStyle>> styles(
        static_cast<std::size_t>(spec.n_style_clusters),
        std::vector<ClassStyle>(static_cast<std::size_t>(spec.n_classes)));
    for (int k = 0; k < spec.n_style_clusters; ++k) {
        const double centered =
            spec.n_style_clusters == 1
                ? 0.0
                : (static_cast<double>(k) / (spec.n_style_clusters - 1)) - 0.5;
        for (int c = 0; c < spec.n_classes; ++c) {
            ClassStyle& style = styles[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
            style.amplitude = 1.0 + spec.inter_subject_scale *
                                        (0.45 * centered + 0.05 * rng.uniform(-1.0, 1.0));
            style.phase = spec.inter_subject_scale *
                          (centered * 1.2 + 0.1 * rng.uniform(-1.0, 1.0));
        }
    }

    DatasetBundle bundle;
    bundle.name = "synth";
    const int subject_width = digits_for(spec.n_subjects);
    const int class_width = digits_for(spec.n_classes);
    for (int c = 0; c < spec.n_classes; ++c) {
        bundle.label_set.push_back(padded_name("c", c, class_width));
    }

    for (int s = 0; s < spec.n_subjects; ++s) {
        const int cluster = s % spec.n_style_clusters;
        SubjectMeta meta;
        meta.subject_id = padded_name("s", s, subject_width);
        if (spec.physical_style_correlation) {
            meta.sex = cluster % 2;
            meta.age = std::max(18, static_cast<int>(std::lround(
                                        rng.normal(25.0 + 28.0 * cluster, 3.0))));
            meta.weight_kg = std::max(35.0, rng.normal(58.0 + 30.0 * cluster, 4.0));
            meta.height_cm = std::max(120.0, rng.normal(162.0 + 18.0 * cluster, 5.0));
        } else {
            meta.sex = rng.unit() < 0.5 ? 0 : 1;
            meta.age = std::max(18, static_cast<int>(std::lround(rng.normal(40.0, 12.0))));
            meta.weight_kg = std::max(35.0, rng.normal(72.0, 15.0));
            meta.height_cm = std::max(120.0, rng.normal(170.0, 10.0));
        }
        bundle.subjects.push_back(std::move(meta));

        int window_id = 0;
        for (int c = 0; c < spec.n_classes; ++c) {
            const ClassStyle& style =
                styles[static_cast<std::size_t>(cluster)][static_cast<std::size_t>(c)];
            for (int w = 0; w < spec.windows_per_class; ++w) {
                LabeledWindow window;
                window.subject_id = bundle.subjects.back().subject_id;
                window.label = bundle.label_set[static_cast<std::size_t>(c)];
                window.window_id = window_id++;
                window.rate_hz = spec.rate_hz;
                window.samples.reserve(static_cast<std::size_t>(spec.window_length));
                for (int t = 0; t < spec.window_length; ++t) {
                    AccelSample sample =
                        template_sample(c, style, static_cast<double>(t) / spec.rate_hz);
                    sample.x += spec.intra_subject_scale * rng.normal(0.0, 1.0);
                    sample.y += spec.intra_subject_scale * rng.normal(0.0, 1.0);
                    sample.z += spec.intra_subject_scale * rng.normal(0.0, 1.0);
                    window.samples.push_back(sample);
                }
                bundle.windows.push_back(std::move(window));
            }
        }
    }

    bundle.validate();
    return bundle;
}

}  // namespace har
