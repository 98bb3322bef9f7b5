#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ensemblepool {

// Errors. Every failure raised by the library derives from Error so callers
// can catch at whatever granularity they need.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ENSEMBLEPOOL_ERROR(Name)                \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

ENSEMBLEPOOL_ERROR(AlignmentError);
ENSEMBLEPOOL_ERROR(NormalizationError);
ENSEMBLEPOOL_ERROR(LabelMismatchError);
ENSEMBLEPOOL_ERROR(DegenerateError);
ENSEMBLEPOOL_ERROR(ShapeMismatchError);
ENSEMBLEPOOL_ERROR(ParameterError);
ENSEMBLEPOOL_ERROR(ConfigError);
ENSEMBLEPOOL_ERROR(ParseError);

#undef ENSEMBLEPOOL_ERROR

/// Row-sum tolerance for probabilities produced inside the library.
inline constexpr double kInternalNormTolerance = 1e-6;
/// Row-sum tolerance accepted when ingesting external prediction files.
inline constexpr double kIngestNormTolerance = 1e-3;

using ClassProbabilities = std::vector<double>;

/// Divides entries by their sum. Throws DegenerateError when the sum is 0
/// and ParameterError on negative or non-finite entries.
ClassProbabilities renormalize(std::span<const double> probs);

/// True when every entry is in [0, 1] and the entries sum to 1 within `tol`.
bool is_probability_row(std::span<const double> row, double tol = kInternalNormTolerance);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> row);

/// N x C matrix of class probabilities keyed by opaque sample ids.
///
/// `degenerate` marks matrices whose rows are not normalized on purpose
/// (Global Argmax output keeps only the winning probability).
class PredictionMatrix {
public:
    PredictionMatrix() = default;
    /// Throws AlignmentError on duplicate ids and ShapeMismatchError when
    /// `values.size() != ids.size() * class_count`.
    PredictionMatrix(std::vector<std::string> sample_ids, std::size_t class_count,
                     std::vector<double> values, bool degenerate = false);

    std::size_t sample_count() const { return sample_ids_.size(); }
    std::size_t class_count() const { return class_count_; }
    const std::vector<std::string>& sample_ids() const { return sample_ids_; }
    const std::vector<double>& values() const { return values_; }
    bool degenerate() const { return degenerate_; }

    std::span<const double> row(std::size_t i) const
    {
        return {values_.data() + i * class_count_, class_count_};
    }
    std::span<double> row(std::size_t i) { return {values_.data() + i * class_count_, class_count_}; }
    double operator()(std::size_t i, std::size_t c) const { return values_[i * class_count_ + c]; }

    /// Rows restricted to `indices`, in that order.
    PredictionMatrix select(std::span<const std::size_t> indices) const;

    friend bool operator==(const PredictionMatrix&, const PredictionMatrix&) = default;

private:
    std::vector<std::string> sample_ids_;
    std::size_t class_count_ = 0;
    std::vector<double> values_;
    bool degenerate_ = false;
};

enum class SourceKind { Architecture, Fold, AugmentedCopy };

std::string to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& name);

struct BundleMember {
    std::string name;
    SourceKind source_kind = SourceKind::Architecture;
    PredictionMatrix matrix;

    friend bool operator==(const BundleMember&, const BundleMember&) = default;
};

/// M aligned prediction matrices over the same samples.
struct EnsembleBundle {
    std::vector<BundleMember> members;

    std::size_t member_count() const { return members.size(); }
    std::size_t sample_count() const { return members.empty() ? 0 : members.front().matrix.sample_count(); }
    std::size_t class_count() const { return members.empty() ? 0 : members.front().matrix.class_count(); }
    const std::vector<std::string>& sample_ids() const { return members.front().matrix.sample_ids(); }

    EnsembleBundle select(std::span<const std::size_t> indices) const;

    friend bool operator==(const EnsembleBundle&, const EnsembleBundle&) = default;
};

/// Ground-truth class indices keyed by sample id.
class LabelVector {
public:
    LabelVector() = default;
    /// Throws AlignmentError on duplicate ids or length mismatch and
    /// ParameterError on labels outside [0, class_count).
    LabelVector(std::vector<std::string> sample_ids, std::vector<int> labels, std::size_t class_count);

    std::size_t size() const { return labels_.size(); }
    std::size_t class_count() const { return class_count_; }
    const std::vector<std::string>& sample_ids() const { return sample_ids_; }
    const std::vector<int>& labels() const { return labels_; }
    int operator[](std::size_t i) const { return labels_[i]; }

    LabelVector select(std::span<const std::size_t> indices) const;
    std::vector<std::size_t> class_counts() const;

    friend bool operator==(const LabelVector&, const LabelVector&) = default;

private:
    std::vector<std::string> sample_ids_;
    std::vector<int> labels_;
    std::size_t class_count_ = 0;
};

enum class Partition { ModelTrain, ModelVal, EnsembleTrain, Testing, FoldTrain, FoldVal };

std::string to_string(Partition p);
Partition partition_from_string(const std::string& name);

/// Assigns every sample of a dataset to one partition. A fold assignment
/// (fold_index set) uses FoldTrain/FoldVal for the cross-validation pool
/// and keeps EnsembleTrain/Testing from the four-way split it came from.
struct SplitAssignment {
    std::vector<std::string> sample_ids;
    std::vector<Partition> partitions;
    std::optional<int> fold_index;

    std::size_t size() const { return partitions.size(); }
    std::vector<std::size_t> indices(Partition p) const;
    std::size_t count(Partition p) const;
    /// ModelTrain for four-way splits, FoldTrain for fold assignments.
    Partition training_partition() const { return fold_index ? Partition::FoldTrain : Partition::ModelTrain; }
    Partition validation_partition() const { return fold_index ? Partition::FoldVal : Partition::ModelVal; }

    friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

/// Positive per-class loss weights.
struct ClassWeights {
    std::vector<double> weights;

    static ClassWeights uniform(std::size_t class_count) { return {std::vector<double>(class_count, 1.0)}; }
    void validate() const;
};

/// Checks alignment and row normalization of every member.
///
/// Rows within `kInternalNormTolerance` of 1 are left untouched, rows
/// within `tolerance` are renormalized, anything further off raises
/// NormalizationError. Degenerate matrices only have their range checked.
/// When `labels` is given its ids must equal the bundle ids in order.
EnsembleBundle validate_bundle(EnsembleBundle bundle, const LabelVector* labels = nullptr,
                               double tolerance = kIngestNormTolerance);

/// Worker count for parallel sections: ENSEMBLEPOOL_THREADS when set,
/// otherwise the hardware concurrency.
std::size_t worker_count();

/// Runs fn(0..n-1) on up to `workers` threads. Exceptions are rethrown on
/// the caller thread (the one from the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t workers = worker_count());

/// splitmix64 step; used to derive independent seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace ensemblepool
