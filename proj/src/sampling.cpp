#include "ensemblepool/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace ensemblepool {

namespace {

constexpr std::array<Partition, 4> kFourWay = {Partition::ModelTrain, Partition::ModelVal, Partition::EnsembleTrain,
                                               Partition::Testing};

// Remainders that differ by less than this are treated as tied; products
// like 0.1 * 625 are not exact in binary.
constexpr double kRemainderEps = 1e-9;

std::vector<std::vector<std::size_t>> indices_by_class(const LabelVector& labels, std::span<const std::size_t> subset)
{
    std::vector<std::vector<std::size_t>> by_class(labels.class_count());
    for (std::size_t i : subset)
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    return by_class;
}

}  // namespace

void SplitRatios::validate() const
{
    const std::array<double, 4> r = {model_train, model_val, ensemble_train, testing};
    for (double v : r)
        if (!(v > 0.0 && v < 1.0))
            throw ParameterError("split ratios must lie in (0, 1)");
    if (std::abs(r[0] + r[1] + r[2] + r[3] - 1.0) > 1e-9)
        throw ParameterError("split ratios must sum to 1");
}

std::vector<std::size_t> largest_remainder_counts(std::size_t n, const SplitRatios& ratios)
{
    const std::array<double, 4> r = {ratios.model_train, ratios.model_val, ratios.ensemble_train, ratios.testing};
    std::vector<std::size_t> counts(4);
    std::array<double, 4> remainder{};
    std::size_t assigned = 0;
    for (std::size_t p = 0; p < 4; ++p) {
        const double exact = r[p] * static_cast<double>(n);
        const double floored = std::floor(exact + kRemainderEps);
        counts[p] = static_cast<std::size_t>(floored);
        remainder[p] = std::max(0.0, exact - floored);
        assigned += counts[p];
    }
    std::array<bool, 4> used{};
    while (assigned < n) {
        std::size_t best = 4;
        for (std::size_t p = 0; p < 4; ++p) {
            if (used[p])
                continue;
            if (best == 4 || remainder[p] > remainder[best] + kRemainderEps)
                best = p;
        }
        if (best == 4) {
            // Only reachable when the ratios do not sum to 1.
            used.fill(false);
            continue;
        }
        used[best] = true;
        ++counts[best];
        ++assigned;
    }
    return counts;
}

SplitAssignment percentage_split(const LabelVector& labels, const SplitRatios& ratios, std::uint64_t seed,
                                 bool stratified)
{
    ratios.validate();
    const std::size_t n = labels.size();
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = i;

    std::vector<std::vector<std::size_t>> groups;
    if (stratified) {
        groups = indices_by_class(labels, all);
        for (std::size_t c = 0; c < groups.size(); ++c)
            if (groups[c].size() < 4)
                throw TooFewSamplesError("class " + std::to_string(c) + " has " + std::to_string(groups[c].size()) +
                                         " samples; stratified splitting needs at least 4");
    } else {
        if (n < 4)
            throw TooFewSamplesError("need at least 4 samples for a four-way split");
        groups.push_back(std::move(all));
    }

    SplitAssignment out;
    out.sample_ids = labels.sample_ids();
    out.partitions.assign(n, Partition::Testing);
    std::mt19937_64 rng(seed);
    for (auto& group : groups) {
        std::shuffle(group.begin(), group.end(), rng);
        const auto counts = largest_remainder_counts(group.size(), ratios);
        std::size_t pos = 0;
        for (std::size_t p = 0; p < 4; ++p)
            for (std::size_t j = 0; j < counts[p]; ++j)
                out.partitions[group[pos++]] = kFourWay[p];
    }
    return out;
}

std::vector<SplitAssignment> kfold_split(const LabelVector& labels, const SplitAssignment& base, const KFoldSpec& spec)
{
    if (spec.k < 2)
        throw ParameterError("k-fold split needs k >= 2");
    if (base.fold_index)
        throw ParameterError("k-fold split needs a four-way base split");
    if (base.sample_ids != labels.sample_ids())
        throw LabelMismatchError("split and labels cover different samples");

    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < base.size(); ++i)
        if (base.partitions[i] == Partition::ModelTrain || base.partitions[i] == Partition::ModelVal)
            pool.push_back(i);

    const auto k = static_cast<std::size_t>(spec.k);
    auto by_class = indices_by_class(labels, pool);
    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> dealt;
    dealt.reserve(pool.size());
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() < k)
            throw TooFewSamplesError("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                                     " cross-validation samples; need at least k = " + std::to_string(k));
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        dealt.insert(dealt.end(), by_class[c].begin(), by_class[c].end());
    }
    // Dealing the class-ordered sequence round-robin keeps every fold
    // stratified and overall fold sizes within one sample of each other.
    std::vector<std::size_t> fold_of(base.size(), 0);
    for (std::size_t pos = 0; pos < dealt.size(); ++pos)
        fold_of[dealt[pos]] = pos % k;

    std::vector<SplitAssignment> folds;
    folds.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
        SplitAssignment a;
        a.sample_ids = base.sample_ids;
        a.partitions = base.partitions;
        a.fold_index = static_cast<int>(f);
        for (std::size_t i : pool)
            a.partitions[i] = fold_of[i] == f ? Partition::FoldVal : Partition::FoldTrain;
        folds.push_back(std::move(a));
    }
    return folds;
}

ClassWeights compute_class_weights(const LabelVector& labels, const SplitAssignment& split)
{
    if (split.sample_ids != labels.sample_ids())
        throw LabelMismatchError("split and labels cover different samples");
    const auto train = split.training_partition();
    const std::size_t classes = labels.class_count();
    std::vector<std::size_t> counts(classes, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split.partitions[i] != train)
            continue;
        ++counts[static_cast<std::size_t>(labels[i])];
        ++total;
    }
    ClassWeights w;
    w.weights.resize(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        if (counts[c] == 0)
            throw EmptyClassError("class " + std::to_string(c) + " is absent from the " + to_string(train) +
                                  " partition");
        w.weights[c] = static_cast<double>(total) / (static_cast<double>(classes) * static_cast<double>(counts[c]));
    }
    return w;
}

}  // namespace ensemblepool
