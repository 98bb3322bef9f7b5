#include "ensemblepool/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>
#include <unordered_set>

namespace ensemblepool {

ClassProbabilities renormalize(std::span<const double> probs)
{
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0)
            throw ParameterError("renormalize: entries must be finite and non-negative");
        sum += p;
    }
    if (sum <= 0.0)
        throw DegenerateError("renormalize: all entries are zero");
    ClassProbabilities out(probs.begin(), probs.end());
    for (double& p : out)
        p /= sum;
    return out;
}

bool is_probability_row(std::span<const double> row, double tol)
{
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0 && p <= 1.0))
            return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

std::size_t argmax(std::span<const double> row)
{
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c)
        if (row[c] > row[best])
            best = c;
    return best;
}

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what)
{
    std::unordered_set<std::string> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids)
        if (!seen.insert(id).second)
            throw AlignmentError(std::string(what) + ": duplicate sample id '" + id + "'");
}

}  // namespace

PredictionMatrix::PredictionMatrix(std::vector<std::string> sample_ids, std::size_t class_count,
                                   std::vector<double> values, bool degenerate)
    : sample_ids_(std::move(sample_ids)), class_count_(class_count), values_(std::move(values)),
      degenerate_(degenerate)
{
    if (class_count_ == 0)
        throw ShapeMismatchError("PredictionMatrix: class count must be positive");
    if (values_.size() != sample_ids_.size() * class_count_)
        throw ShapeMismatchError("PredictionMatrix: expected " + std::to_string(sample_ids_.size() * class_count_) +
                                 " values, got " + std::to_string(values_.size()));
    require_unique(sample_ids_, "PredictionMatrix");
}

PredictionMatrix PredictionMatrix::select(std::span<const std::size_t> indices) const
{
    std::vector<std::string> ids;
    std::vector<double> values;
    ids.reserve(indices.size());
    values.reserve(indices.size() * class_count_);
    for (std::size_t i : indices) {
        ids.push_back(sample_ids_.at(i));
        auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
    }
    return {std::move(ids), class_count_, std::move(values), degenerate_};
}

std::string to_string(SourceKind kind)
{
    switch (kind) {
    case SourceKind::Architecture: return "architecture";
    case SourceKind::Fold: return "fold";
    case SourceKind::AugmentedCopy: return "augmented_copy";
    }
    return "architecture";
}

SourceKind source_kind_from_string(const std::string& name)
{
    if (name == "architecture") return SourceKind::Architecture;
    if (name == "fold") return SourceKind::Fold;
    if (name == "augmented_copy") return SourceKind::AugmentedCopy;
    throw ParseError("unknown source kind '" + name + "'");
}

EnsembleBundle EnsembleBundle::select(std::span<const std::size_t> indices) const
{
    EnsembleBundle out;
    out.members.reserve(members.size());
    for (const auto& m : members)
        out.members.push_back({m.name, m.source_kind, m.matrix.select(indices)});
    return out;
}

LabelVector::LabelVector(std::vector<std::string> sample_ids, std::vector<int> labels, std::size_t class_count)
    : sample_ids_(std::move(sample_ids)), labels_(std::move(labels)), class_count_(class_count)
{
    if (sample_ids_.size() != labels_.size())
        throw AlignmentError("LabelVector: ids and labels differ in length");
    require_unique(sample_ids_, "LabelVector");
    for (int l : labels_)
        if (l < 0 || static_cast<std::size_t>(l) >= class_count_)
            throw ParameterError("LabelVector: label " + std::to_string(l) + " outside [0, " +
                                 std::to_string(class_count_) + ")");
}

LabelVector LabelVector::select(std::span<const std::size_t> indices) const
{
    std::vector<std::string> ids;
    std::vector<int> labels;
    ids.reserve(indices.size());
    labels.reserve(indices.size());
    for (std::size_t i : indices) {
        ids.push_back(sample_ids_.at(i));
        labels.push_back(labels_.at(i));
    }
    return {std::move(ids), std::move(labels), class_count_};
}

std::vector<std::size_t> LabelVector::class_counts() const
{
    std::vector<std::size_t> counts(class_count_, 0);
    for (int l : labels_)
        ++counts[static_cast<std::size_t>(l)];
    return counts;
}

std::string to_string(Partition p)
{
    switch (p) {
    case Partition::ModelTrain: return "model-train";
    case Partition::ModelVal: return "model-val";
    case Partition::EnsembleTrain: return "ensemble-train";
    case Partition::Testing: return "testing";
    case Partition::FoldTrain: return "fold-train";
    case Partition::FoldVal: return "fold-val";
    }
    return "testing";
}

Partition partition_from_string(const std::string& name)
{
    for (auto p : {Partition::ModelTrain, Partition::ModelVal, Partition::EnsembleTrain, Partition::Testing,
                   Partition::FoldTrain, Partition::FoldVal})
        if (to_string(p) == name)
            return p;
    throw ParseError("unknown partition '" + name + "'");
}

std::vector<std::size_t> SplitAssignment::indices(Partition p) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < partitions.size(); ++i)
        if (partitions[i] == p)
            out.push_back(i);
    return out;
}

std::size_t SplitAssignment::count(Partition p) const
{
    return static_cast<std::size_t>(std::count(partitions.begin(), partitions.end(), p));
}

void ClassWeights::validate() const
{
    if (weights.empty())
        throw ParameterError("ClassWeights: empty");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w))
            throw ParameterError("ClassWeights: weights must be positive");
}

EnsembleBundle validate_bundle(EnsembleBundle bundle, const LabelVector* labels, double tolerance)
{
    if (bundle.members.empty())
        throw AlignmentError("bundle has no members");
    const auto& ref = bundle.members.front().matrix;
    for (auto& member : bundle.members) {
        auto& m = member.matrix;
        if (m.class_count() != ref.class_count())
            throw AlignmentError("member '" + member.name + "' has " + std::to_string(m.class_count()) +
                                 " classes, expected " + std::to_string(ref.class_count()));
        if (m.sample_ids() != ref.sample_ids())
            throw AlignmentError("member '" + member.name + "' sample ids do not match member '" +
                                 bundle.members.front().name + "'");
        for (std::size_t i = 0; i < m.sample_count(); ++i) {
            auto row = m.row(i);
            if (m.degenerate()) {
                for (double p : row)
                    if (!(p >= 0.0 && p <= 1.0))
                        throw NormalizationError("member '" + member.name + "' row " + std::to_string(i) +
                                                 " has an entry outside [0, 1]");
                continue;
            }
            double sum = 0.0;
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0 + tolerance))
                    throw NormalizationError("member '" + member.name + "' row " + std::to_string(i) +
                                             " has an entry outside [0, 1]");
                sum += p;
            }
            const double dev = std::abs(sum - 1.0);
            if (dev > tolerance)
                throw NormalizationError("member '" + member.name + "' sample '" + m.sample_ids()[i] +
                                         "' sums to " + std::to_string(sum));
            if (dev > kInternalNormTolerance) {
                auto fixed = renormalize(row);
                std::copy(fixed.begin(), fixed.end(), row.begin());
            }
        }
    }
    if (labels) {
        if (labels->sample_ids() != ref.sample_ids())
            throw LabelMismatchError("label sample ids do not match bundle sample ids");
        if (labels->class_count() != ref.class_count())
            throw LabelMismatchError("label class count differs from bundle class count");
    }
    return bundle;
}

std::size_t worker_count()
{
    if (const char* env = std::getenv("ENSEMBLEPOOL_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t workers)
{
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        threads.emplace_back(work);
    for (auto& t : threads)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace ensemblepool
