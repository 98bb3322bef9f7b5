#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ensemblepool/core.hpp"
#include "ensemblepool/metrics.hpp"
#include "ensemblepool/poolers.hpp"
#include "ensemblepool/sampling.hpp"

namespace ensemblepool {

class DegenerateSplitError : public Error {
public:
    using Error::Error;
};

/// Isotropic Gaussian blobs standing in for an image dataset.
struct SyntheticSpec {
    std::size_t n_samples = 1000;
    std::size_t n_classes = 2;
    std::size_t n_features = 2;
    double class_separation = 3.0;  // distance between class centers
    double label_noise = 0.0;       // fraction of labels redrawn uniformly
    std::vector<double> imbalance;  // per-class proportions; empty means balanced
    std::uint64_t seed = 0;

    void validate() const;
};

struct Dataset {
    Eigen::MatrixXd features;  // N x D
    LabelVector labels;
};

Dataset generate_dataset(const SyntheticSpec& spec);

struct FocalLossParams {
    double gamma = 2.0;
    /// Per-class weights; left empty, training derives them from the split.
    ClassWeights alpha;
};

/// -alpha_t (1 - p_t)^gamma log p_t with p_t clamped to >= 1e-12.
double focal_loss(std::span<const double> probs, int true_class, const FocalLossParams& params);

/// Gradient of focal_loss(softmax(logits)) with respect to the logits.
std::vector<double> focal_loss_gradient(std::span<const double> logits, int true_class, const FocalLossParams& params);

struct BaseLearnerSpec {
    std::string member_name = "learner";
    double feature_subset_fraction = 1.0;
    std::uint64_t init_seed = 0;
    double learning_rate = 0.5;
    int max_epochs = 1000;
    int patience = 15;

    void validate() const;
};

/// Softmax regression over a fixed feature subset.
struct BaseModel {
    std::string name;
    std::vector<Eigen::Index> feature_indices;
    Eigen::MatrixXd weights;  // C x |subset|
    Eigen::VectorXd bias;     // C
    int epochs_run = 0;
    int best_epoch = 0;       // 1-based epoch of the checkpoint
    std::vector<double> validation_losses;  // one per epoch run

    /// N x C probabilities for full-width feature rows.
    Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const;
};

/// Full-batch gradient descent on the focal loss over the training
/// partition of `split`; keeps the epoch with the lowest mean validation
/// loss and stops after `patience` epochs without improvement.
BaseModel train_base_learner(const Eigen::MatrixXd& features, const LabelVector& labels, const SplitAssignment& split,
                             const BaseLearnerSpec& spec, FocalLossParams loss = {});

PredictionMatrix predict_matrix(const BaseModel& model, const Eigen::MatrixXd& features,
                                std::vector<std::string> sample_ids);

/// Test-time augmentation analog: T copies of the inputs with Gaussian
/// jitter, copy 0 noise-free.
struct AugmentSpec {
    int copies = 15;
    double jitter_sigma = 0.05;
    std::uint64_t seed = 0;
};

EnsembleBundle predict_augmented(const BaseModel& model, const Eigen::MatrixXd& features,
                                 const std::vector<std::string>& sample_ids, const AugmentSpec& aug);

enum class Scenario { Baseline, Augmenting, Stacking, Bagging };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct ExperimentConfig {
    std::uint64_t seed = 0;  // master seed; every component seed is derived from it
    SyntheticSpec dataset;
    SplitRatios ratios;
    bool stratified = true;
    std::vector<BaseLearnerSpec> learners;
    double focal_gamma = 2.0;
    std::vector<Scenario> scenarios{Scenario::Baseline};
    std::vector<PoolerKind> poolers{PoolerKind::MeanUnweighted};
    AugmentSpec augment;
    KFoldSpec kfold;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct MethodResult {
    Scenario technique = Scenario::Baseline;
    std::string learner;  // base learner name; empty for Stacking
    std::string method;   // pooler name, or "single" for Baseline
    MetricReport metrics;
};

struct TechniqueDelta {
    Scenario technique = Scenario::Baseline;
    std::string best_learner;
    std::string best_method;
    double f1 = 0.0;
    double accuracy = 0.0;
    double f1_gain_percent = 0.0;        // relative to the best Baseline F1
    double accuracy_gain_percent = 0.0;  // relative to that model's accuracy
};

struct ExperimentReport {
    std::string baseline_best;  // learner with the highest testing macro-F1
    double baseline_best_f1 = 0.0;
    double baseline_best_accuracy = 0.0;
    std::vector<MethodResult> results;
    std::vector<TechniqueDelta> deltas;  // one per requested non-Baseline technique
};

ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace ensemblepool
