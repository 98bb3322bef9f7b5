#include <algorithm>
#include <numeric>

#include "ensemblepool/learners.hpp"

namespace ensemblepool {

double gini_impurity(std::span<const double> class_counts)
{
    double total = 0.0;
    for (double c : class_counts)
        total += c;
    if (total <= 0.0)
        return 0.0;
    double sum_sq = 0.0;
    for (double c : class_counts)
        sum_sq += (c / total) * (c / total);
    return 1.0 - sum_sq;
}

std::size_t TreeModel::depth() const
{
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        const auto& n = nodes[static_cast<std::size_t>(id)];
        if (!n.is_leaf()) {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return best;
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;
};

class TreeBuilder {
public:
    TreeBuilder(const TrainSet& train, std::optional<int> max_depth) : train_(train), max_depth_(max_depth)
    {
        model_.feature_count = train.feature_count();
        model_.class_count = train.class_count;
    }

    TreeModel build()
    {
        std::vector<std::size_t> all(train_.sample_count());
        std::iota(all.begin(), all.end(), 0);
        grow(all, 0);
        return std::move(model_);
    }

private:
    std::vector<double> counts_of(const std::vector<std::size_t>& idx) const
    {
        std::vector<double> counts(train_.class_count, 0.0);
        for (std::size_t i : idx)
            counts[static_cast<std::size_t>(train_.labels[i])] += 1.0;
        return counts;
    }

    // Best (feature, midpoint threshold) by Gini decrease; ties keep the
    // lowest feature index and then the lowest threshold.
    Split best_split(const std::vector<std::size_t>& idx, const std::vector<double>& parent_counts) const
    {
        const double n = static_cast<double>(idx.size());
        const double parent_gini = gini_impurity(parent_counts);
        Split best;
        std::vector<std::size_t> order(idx);
        std::vector<double> left(train_.class_count);
        std::vector<double> right(train_.class_count);
        for (std::size_t f = 0; f < train_.feature_count(); ++f) {
            const auto col = train_.features.col(static_cast<Eigen::Index>(f));
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = col(static_cast<Eigen::Index>(a));
                const double vb = col(static_cast<Eigen::Index>(b));
                return va < vb || (va == vb && a < b);
            });
            std::fill(left.begin(), left.end(), 0.0);
            right = parent_counts;
            for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
                const auto cls = static_cast<std::size_t>(train_.labels[order[pos]]);
                left[cls] += 1.0;
                right[cls] -= 1.0;
                const double v = col(static_cast<Eigen::Index>(order[pos]));
                const double next = col(static_cast<Eigen::Index>(order[pos + 1]));
                if (!(next > v))
                    continue;
                const double n_left = static_cast<double>(pos + 1);
                const double n_right = n - n_left;
                const double decrease =
                    parent_gini - (n_left / n) * gini_impurity(left) - (n_right / n) * gini_impurity(right);
                if (decrease > best.decrease) {
                    best.feature = static_cast<int>(f);
                    best.threshold = v + (next - v) / 2.0;
                    // Guard against the midpoint rounding onto the upper value.
                    if (!(best.threshold < next))
                        best.threshold = v;
                    best.decrease = decrease;
                }
            }
        }
        return best;
    }

    int grow(const std::vector<std::size_t>& idx, int depth)
    {
        const int id = static_cast<int>(model_.nodes.size());
        model_.nodes.push_back({});
        auto counts = counts_of(idx);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
        const bool depth_limited = max_depth_ && depth >= *max_depth_;
        Split split;
        if (!pure && !depth_limited && idx.size() >= 2)
            split = best_split(idx, counts);
        model_.nodes[static_cast<std::size_t>(id)].class_counts = std::move(counts);
        if (split.feature < 0)
            return id;

        std::vector<std::size_t> left_idx, right_idx;
        const auto col = train_.features.col(split.feature);
        for (std::size_t i : idx)
            (col(static_cast<Eigen::Index>(i)) <= split.threshold ? left_idx : right_idx).push_back(i);

        const int left = grow(left_idx, depth + 1);
        const int right = grow(right_idx, depth + 1);
        auto& node = model_.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    const TrainSet& train_;
    std::optional<int> max_depth_;
    TreeModel model_;
};

}  // namespace

TreeModel fit_decision_tree(const TrainSet& train, std::optional<int> max_depth)
{
    train.validate();
    if (max_depth && *max_depth < 0)
        throw ParameterError("max_depth must be non-negative");
    return TreeBuilder(train, max_depth).build();
}

}  // namespace ensemblepool
