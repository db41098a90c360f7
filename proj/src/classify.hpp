#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hyperradon {

enum class Norm { L1, L2, Linf };

Norm parse_norm(const std::string& name);  // "l1" | "l2" | "linf"

struct LabeledSample {
    int label = 0;
    int sample_id = 0;
    std::vector<double> features;
};

struct LabeledFeatureSet {
    std::vector<LabeledSample> samples;

    int feature_dim() const;
    std::vector<int> class_labels() const;  // distinct labels, ascending
};

struct ExperimentConfig {
    int train_per_class = 1;
    int repeats = 20;
    Norm norm = Norm::L2;
    uint64_t rng_seed = 0;
};

struct ExperimentResult {
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::vector<double> accuracies;       // one per repeat
    std::vector<int> class_labels;
    std::vector<double> confusion;        // [classes x classes], percent per true row
    std::vector<double> distance_map;     // [n x n] pairwise feature distances
};

double feature_distance(std::span<const double> a, std::span<const double> b, Norm norm);

/// Label of the training sample closest to the query; ties resolved towards
/// the lowest sample_id.
int knn1(const LabeledFeatureSet& train, std::span<const double> query, Norm norm);

/// Repeated stratified-split 1-NN experiment; per-repeat seeds are
/// seed + repeat index, so results do not depend on scheduling.
ExperimentResult run_experiment(const LabeledFeatureSet& features,
                                const ExperimentConfig& config);

void save_accuracy_csv(const ExperimentResult& result, const std::string& path,
                       const std::string& comment = "");
void save_confusion_csv(const ExperimentResult& result, const std::string& path,
                        const std::string& comment = "");
void save_distmap_csv(const ExperimentResult& result, const std::string& path,
                      const std::string& comment = "");

}  // namespace hyperradon
