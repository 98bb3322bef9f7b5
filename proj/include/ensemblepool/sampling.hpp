#pragma once

#include <cstdint>
#include <vector>

#include "ensemblepool/core.hpp"

namespace ensemblepool {

class TooFewSamplesError : public Error {
public:
    using Error::Error;
};

class EmptyClassError : public Error {
public:
    using Error::Error;
};

/// Fractions for the four-way model-train / model-val / ensemble-train /
/// testing split.
struct SplitRatios {
    double model_train = 0.65;
    double model_val = 0.10;
    double ensemble_train = 0.10;
    double testing = 0.15;

    /// Throws ParameterError unless all fractions are in (0, 1) and sum to 1.
    void validate() const;
};

struct KFoldSpec {
    int k = 5;
    std::uint64_t seed = 0;
};

/// Distributes `n` items over the four partitions by largest remainder:
/// floors of ratio * n first, leftovers to the largest fractional parts,
/// ties in partition order.
std::vector<std::size_t> largest_remainder_counts(std::size_t n, const SplitRatios& ratios);

/// Seeded four-way split. Stratified splits partition every class
/// independently and need at least 4 samples per class.
SplitAssignment percentage_split(const LabelVector& labels, const SplitRatios& ratios, std::uint64_t seed,
                                 bool stratified = true);

/// Cross-validation variant: the model-train and model-val samples of
/// `base` are pooled and dealt into k stratified folds. Output i marks fold i
/// as FoldVal and the rest of the pool as FoldTrain; ensemble-train and
/// testing samples are carried over unchanged.
std::vector<SplitAssignment> kfold_split(const LabelVector& labels, const SplitAssignment& base,
                                         const KFoldSpec& spec);

/// Balanced inverse-frequency weights N_train / (C * n_c) over the training
/// partition of `split`.
ClassWeights compute_class_weights(const LabelVector& labels, const SplitAssignment& split);

}  // namespace ensemblepool
