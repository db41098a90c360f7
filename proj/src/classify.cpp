#include "classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace hyperradon {

Norm parse_norm(const std::string& name) {
    if (name == "l1" || name == "L1") {
        return Norm::L1;
    }
    if (name == "l2" || name == "L2") {
        return Norm::L2;
    }
    if (name == "linf" || name == "Linf") {
        return Norm::Linf;
    }
    throw std::invalid_argument("norm must be one of l1, l2, linf");
}

int LabeledFeatureSet::feature_dim() const {
    return samples.empty() ? 0 : static_cast<int>(samples.front().features.size());
}

std::vector<int> LabeledFeatureSet::class_labels() const {
    std::vector<int> labels;
    for (const auto& s : samples) {
        labels.push_back(s.label);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

double feature_distance(std::span<const double> a, std::span<const double> b, Norm norm) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("feature_distance: dimension mismatch");
    }
    double acc = 0.0;
    switch (norm) {
        case Norm::L1:
            for (size_t i = 0; i < a.size(); ++i) {
                acc += std::abs(a[i] - b[i]);
            }
            return acc;
        case Norm::L2:
            for (size_t i = 0; i < a.size(); ++i) {
                acc += (a[i] - b[i]) * (a[i] - b[i]);
            }
            return std::sqrt(acc);
        case Norm::Linf:
            for (size_t i = 0; i < a.size(); ++i) {
                acc = std::max(acc, std::abs(a[i] - b[i]));
            }
            return acc;
    }
    return acc;
}

int knn1(const LabeledFeatureSet& train, std::span<const double> query, Norm norm) {
    if (train.samples.empty()) {
        throw std::invalid_argument("knn1: empty training set");
    }
    int best_label = train.samples.front().label;
    int best_id = train.samples.front().sample_id;
    double best_dist = feature_distance(train.samples.front().features, query, norm);
    for (size_t i = 1; i < train.samples.size(); ++i) {
        const auto& s = train.samples[i];
        const double dist = feature_distance(s.features, query, norm);
        if (dist < best_dist || (dist == best_dist && s.sample_id < best_id)) {
            best_dist = dist;
            best_label = s.label;
            best_id = s.sample_id;
        }
    }
    return best_label;
}

ExperimentResult run_experiment(const LabeledFeatureSet& features,
                                const ExperimentConfig& config) {
    if (config.repeats < 1) {
        throw std::invalid_argument("run_experiment: repeats must be >= 1");
    }
    const auto labels = features.class_labels();
    if (labels.size() < 2) {
        throw std::invalid_argument("run_experiment: need at least two classes");
    }
    std::map<int, std::vector<int>> by_class;  // label -> sample indices
    for (int i = 0; i < static_cast<int>(features.samples.size()); ++i) {
        by_class[features.samples[static_cast<size_t>(i)].label].push_back(i);
    }
    for (const auto& [label, members] : by_class) {
        if (config.train_per_class < 1 ||
            config.train_per_class >= static_cast<int>(members.size())) {
            throw std::invalid_argument(
                "run_experiment: train count must leave test samples in every class");
        }
    }
    std::map<int, int> class_index;
    for (size_t i = 0; i < labels.size(); ++i) {
        class_index[labels[i]] = static_cast<int>(i);
    }
    const size_t n_classes = labels.size();

    ExperimentResult result;
    result.class_labels = labels;
    std::vector<double> confusion_counts(n_classes * n_classes, 0.0);

    for (int rep = 0; rep < config.repeats; ++rep) {
        Rng rng(config.rng_seed + static_cast<uint64_t>(rep));
        LabeledFeatureSet train;
        std::vector<int> test;
        for (const int label : labels) {
            std::vector<int> members = by_class[label];
            // Fisher-Yates with the per-repeat stream.
            for (size_t i = members.size(); i > 1; --i) {
                const size_t j = rng.uniform_index(i);
                std::swap(members[i - 1], members[j]);
            }
            for (size_t i = 0; i < members.size(); ++i) {
                if (static_cast<int>(i) < config.train_per_class) {
                    train.samples.push_back(features.samples[static_cast<size_t>(members[i])]);
                } else {
                    test.push_back(members[i]);
                }
            }
        }
        int correct = 0;
        for (const int idx : test) {
            const auto& sample = features.samples[static_cast<size_t>(idx)];
            const int predicted = knn1(train, sample.features, config.norm);
            if (predicted == sample.label) {
                ++correct;
            }
            confusion_counts[static_cast<size_t>(class_index[sample.label]) * n_classes +
                             static_cast<size_t>(class_index[predicted])] += 1.0;
        }
        result.accuracies.push_back(static_cast<double>(correct) /
                                    static_cast<double>(test.size()));
    }

    double mean = 0.0;
    for (double a : result.accuracies) {
        mean += a;
    }
    mean /= static_cast<double>(result.accuracies.size());
    double var = 0.0;
    for (double a : result.accuracies) {
        var += (a - mean) * (a - mean);
    }
    result.mean_accuracy = mean;
    result.std_accuracy = result.accuracies.size() > 1
                              ? std::sqrt(var / (static_cast<double>(result.accuracies.size()) - 1.0))
                              : 0.0;

    result.confusion.assign(n_classes * n_classes, 0.0);
    for (size_t r = 0; r < n_classes; ++r) {
        double row_total = 0.0;
        for (size_t c = 0; c < n_classes; ++c) {
            row_total += confusion_counts[r * n_classes + c];
        }
        if (row_total > 0.0) {
            for (size_t c = 0; c < n_classes; ++c) {
                result.confusion[r * n_classes + c] =
                    100.0 * confusion_counts[r * n_classes + c] / row_total;
            }
        }
    }

    const size_t n = features.samples.size();
    result.distance_map.assign(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double dist = feature_distance(features.samples[i].features,
                                                 features.samples[j].features, config.norm);
            result.distance_map[i * n + j] = dist;
            result.distance_map[j * n + i] = dist;
        }
    }
    return result;
}

void save_accuracy_csv(const ExperimentResult& result, const std::string& path,
                       const std::string& comment) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        throw IoError("accuracy CSV: cannot open for writing: " + path);
    }
    if (!comment.empty()) {
        std::fprintf(f, "# %s\n", comment.c_str());
    }
    std::fprintf(f, "repeat,accuracy\n");
    for (size_t i = 0; i < result.accuracies.size(); ++i) {
        std::fprintf(f, "%zu,%.17g\n", i, result.accuracies[i]);
    }
    std::fclose(f);
}

void save_confusion_csv(const ExperimentResult& result, const std::string& path,
                        const std::string& comment) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        throw IoError("confusion CSV: cannot open for writing: " + path);
    }
    if (!comment.empty()) {
        std::fprintf(f, "# %s\n", comment.c_str());
    }
    std::fprintf(f, "true_label");
    for (int label : result.class_labels) {
        std::fprintf(f, ",pred_%d", label);
    }
    std::fprintf(f, "\n");
    const size_t n = result.class_labels.size();
    for (size_t r = 0; r < n; ++r) {
        std::fprintf(f, "%d", result.class_labels[r]);
        for (size_t c = 0; c < n; ++c) {
            std::fprintf(f, ",%.17g", result.confusion[r * n + c]);
        }
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void save_distmap_csv(const ExperimentResult& result, const std::string& path,
                      const std::string& comment) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        throw IoError("distmap CSV: cannot open for writing: " + path);
    }
    if (!comment.empty()) {
        std::fprintf(f, "# %s\n", comment.c_str());
    }
    const size_t n = result.distance_map.empty()
                         ? 0
                         : static_cast<size_t>(std::lround(std::sqrt(
                               static_cast<double>(result.distance_map.size()))));
    std::fprintf(f, "i,j,distance\n");
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            std::fprintf(f, "%zu,%zu,%.17g\n", i, j, result.distance_map[i * n + j]);
        }
    }
    std::fclose(f);
}

}  // namespace hyperradon
