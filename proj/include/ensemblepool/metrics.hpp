#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensemblepool/core.hpp"

namespace ensemblepool {

class OneClassError : public Error {
public:
    using Error::Error;
};

/// One-vs-rest confusion counts for a single class.
struct ClassCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct ConfusionCounts {
    std::vector<ClassCounts> per_class;
    std::size_t sample_count = 0;

    std::size_t class_count() const { return per_class.size(); }
    std::size_t correct() const;
};

/// A rate whose denominator may vanish; such rates are 0 with `degenerate` set.
struct Rate {
    double value = 0.0;
    bool degenerate = false;
};

/// Predicted class is the row argmax (lowest index on ties).
ConfusionCounts confusion(const PredictionMatrix& predictions, const LabelVector& labels);

double accuracy(const ConfusionCounts& counts, std::size_t c);
Rate f1(const ConfusionCounts& counts, std::size_t c);
Rate sensitivity(const ConfusionCounts& counts, std::size_t c);
Rate fpr(const ConfusionCounts& counts, std::size_t c);
/// 1 - FPR, sharing its degenerate flag.
Rate specificity(const ConfusionCounts& counts, std::size_t c);

/// Fraction of samples whose true class is outside the k highest-probability
/// classes. Equal probabilities rank the lower class index first.
double top_k_error(const PredictionMatrix& predictions, const LabelVector& labels, std::size_t k);

/// Unweighted mean.
double macro(std::span<const double> values);

/// Macro-averaged F1 of the argmax predictions.
double macro_f1(const PredictionMatrix& predictions, const LabelVector& labels);

struct RocPoint {
    double threshold = 0.0;  // +inf for the origin
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// ROC curve by descending threshold sweep; samples with tied scores enter
/// together and yield one point. AUC by trapezoidal integration.
/// Throws OneClassError unless both positives and negatives are present.
RocCurve roc_auc(std::span<const double> scores, std::span<const bool> positive);

struct ClassMetrics {
    ClassCounts counts;
    double accuracy = 0.0;
    Rate f1;
    Rate sensitivity;
    Rate fpr;
    Rate specificity;
    std::optional<RocCurve> roc;  // empty when the class is all-positive or all-negative
};

struct MetricReport {
    std::size_t sample_count = 0;
    std::vector<ClassMetrics> per_class;
    double macro_accuracy = 0.0;
    double macro_f1 = 0.0;
    double macro_sensitivity = 0.0;
    double macro_fpr = 0.0;
    double macro_specificity = 0.0;
    /// Mean over classes that have a defined AUC; empty when none do.
    std::optional<double> macro_auc;
    double top1_error = 0.0;
    std::optional<double> top3_error;  // empty when C < 3
};

MetricReport evaluate(const PredictionMatrix& predictions, const LabelVector& labels);

}  // namespace ensemblepool
