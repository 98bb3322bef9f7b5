#include "ensemblepool/poolers.hpp"

#include <cmath>
#include <set>

#include "ensemblepool/metrics.hpp"

namespace ensemblepool {

std::string to_string(PoolerKind kind)
{
    switch (kind) {
    case PoolerKind::BestModel: return "best-model";
    case PoolerKind::DecisionTree: return "decision-tree";
    case PoolerKind::GaussianProcess: return "gaussian-process";
    case PoolerKind::GlobalArgmax: return "global-argmax";
    case PoolerKind::LogisticRegression: return "logistic-regression";
    case PoolerKind::MajorityVoteHard: return "majority-vote-hard";
    case PoolerKind::MajorityVoteSoft: return "majority-vote-soft";
    case PoolerKind::MeanUnweighted: return "mean-unweighted";
    case PoolerKind::MeanWeighted: return "mean-weighted";
    case PoolerKind::NaiveBayesComplement: return "naive-bayes-complement";
    case PoolerKind::SupportVectorMachine: return "support-vector-machine";
    case PoolerKind::KNearestNeighbors: return "k-nearest-neighbors";
    }
    return "mean-unweighted";
}

PoolerKind pooler_kind_from_string(const std::string& name)
{
    for (auto kind : kAllPoolerKinds)
        if (to_string(kind) == name)
            return kind;
    throw ParameterError("unknown pooler '" + name + "'");
}

bool is_static(PoolerKind kind)
{
    return kind == PoolerKind::GlobalArgmax || kind == PoolerKind::MajorityVoteHard ||
           kind == PoolerKind::MajorityVoteSoft || kind == PoolerKind::MeanUnweighted;
}

bool is_trainable(PoolerKind kind)
{
    return !is_static(kind) && kind != PoolerKind::BestModel && kind != PoolerKind::MeanWeighted;
}

namespace {

void require_members(const EnsembleBundle& bundle)
{
    if (bundle.members.empty())
        throw ShapeMismatchError("bundle has no members");
    const auto& ref = bundle.members.front().matrix;
    for (const auto& m : bundle.members)
        if (m.matrix.class_count() != ref.class_count() || m.matrix.sample_count() != ref.sample_count())
            throw ShapeMismatchError("member '" + m.name + "' does not match the bundle shape");
}

PredictionMatrix with_values(const EnsembleBundle& bundle, std::vector<double> values, bool degenerate = false)
{
    return {bundle.sample_ids(), bundle.class_count(), std::move(values), degenerate};
}

std::vector<double> member_f1_scores(const EnsembleBundle& bundle, const LabelVector& labels)
{
    std::vector<double> scores;
    scores.reserve(bundle.member_count());
    for (const auto& m : bundle.members)
        scores.push_back(macro_f1(m.matrix, labels));
    return scores;
}

LearnerModel fit_learner(PoolerKind kind, const TrainSet& train)
{
    switch (kind) {
    case PoolerKind::DecisionTree: return fit_decision_tree(train);
    case PoolerKind::GaussianProcess: return fit_gp_classifier(train);
    case PoolerKind::LogisticRegression: return fit_logistic_regression(train);
    case PoolerKind::NaiveBayesComplement: return fit_complement_nb(train);
    case PoolerKind::SupportVectorMachine: return fit_svm(train);
    case PoolerKind::KNearestNeighbors: return fit_knn(train);
    default: break;
    }
    throw ParameterError("pooler '" + to_string(kind) + "' is not backed by a learner");
}

}  // namespace

Eigen::MatrixXd stacking_features(const EnsembleBundle& bundle)
{
    require_members(bundle);
    const auto n = static_cast<Eigen::Index>(bundle.sample_count());
    const auto c = static_cast<Eigen::Index>(bundle.class_count());
    Eigen::MatrixXd x(n, c * static_cast<Eigen::Index>(bundle.member_count()));
    for (std::size_t m = 0; m < bundle.member_count(); ++m) {
        const auto& matrix = bundle.members[m].matrix;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < c; ++k)
                x(i, static_cast<Eigen::Index>(m) * c + k) = matrix(static_cast<std::size_t>(i), static_cast<std::size_t>(k));
    }
    return x;
}

FittedPooler fit_pooler(PoolerKind kind, const EnsembleBundle& bundle, const LabelVector& labels)
{
    require_members(bundle);
    if (labels.sample_ids() != bundle.sample_ids())
        throw LabelMismatchError("pooler labels do not match the bundle samples");
    if (labels.class_count() != bundle.class_count())
        throw LabelMismatchError("pooler labels and bundle disagree on the class count");

    FittedPooler pooler;
    pooler.kind = kind;
    pooler.member_count = bundle.member_count();
    pooler.class_count = bundle.class_count();
    if (is_static(kind))
        return pooler;

    if (kind == PoolerKind::BestModel || kind == PoolerKind::MeanWeighted) {
        const auto scores = member_f1_scores(bundle, labels);
        if (kind == PoolerKind::BestModel) {
            std::size_t best = 0;
            for (std::size_t m = 1; m < scores.size(); ++m)
                if (scores[m] > scores[best])
                    best = m;
            pooler.state = BestMember{best};
        } else {
            double total = 0.0;
            for (double s : scores)
                total += s;
            MemberWeights w;
            w.weights.resize(scores.size());
            for (std::size_t m = 0; m < scores.size(); ++m)
                w.weights[m] = total > 0.0 ? scores[m] / total : 1.0 / static_cast<double>(scores.size());
            pooler.state = std::move(w);
        }
        return pooler;
    }

    std::set<int> distinct(labels.labels().begin(), labels.labels().end());
    if (distinct.size() < 2)
        throw DegenerateLabelsError("pooler '" + to_string(kind) + "' needs at least 2 distinct labels");
    TrainSet train{stacking_features(bundle), labels.labels(), labels.class_count()};
    pooler.state = fit_learner(kind, train);
    return pooler;
}

PredictionMatrix pool_mean_unweighted(const EnsembleBundle& bundle)
{
    require_members(bundle);
    // Running mean: identical members reproduce their values bit for bit.
    std::vector<double> values = bundle.members.front().matrix.values();
    for (std::size_t m = 1; m < bundle.member_count(); ++m) {
        const auto& src = bundle.members[m].matrix.values();
        const double k = static_cast<double>(m + 1);
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] += (src[i] - values[i]) / k;
    }
    return with_values(bundle, std::move(values));
}

PredictionMatrix pool_mean_weighted(const EnsembleBundle& bundle, std::span<const double> weights)
{
    require_members(bundle);
    if (weights.size() != bundle.member_count())
        throw ShapeMismatchError("expected " + std::to_string(bundle.member_count()) + " member weights, got " +
                                 std::to_string(weights.size()));
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw ParameterError("member weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > kInternalNormTolerance)
        throw ParameterError("member weights must sum to 1");
    std::vector<double> values(bundle.members.front().matrix.values().size(), 0.0);
    for (std::size_t m = 0; m < bundle.member_count(); ++m) {
        const auto& src = bundle.members[m].matrix.values();
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] += weights[m] * src[i];
    }
    return with_values(bundle, std::move(values));
}

PredictionMatrix pool_majority_vote_hard(const EnsembleBundle& bundle)
{
    require_members(bundle);
    const std::size_t n = bundle.sample_count();
    const std::size_t classes = bundle.class_count();
    std::vector<double> values(n * classes, 0.0);
    std::vector<std::size_t> votes(classes);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& m : bundle.members)
            ++votes[argmax(m.matrix.row(i))];
        std::size_t winner = 0;
        for (std::size_t c = 1; c < classes; ++c)
            if (votes[c] > votes[winner])
                winner = c;
        values[i * classes + winner] = 1.0;
    }
    return with_values(bundle, std::move(values));
}

PredictionMatrix pool_majority_vote_soft(const EnsembleBundle& bundle)
{
    require_members(bundle);
    const std::size_t n = bundle.sample_count();
    const std::size_t classes = bundle.class_count();
    std::vector<double> values(n * classes, 0.0);
    for (const auto& m : bundle.members)
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] += m.matrix.values()[i];
    for (std::size_t i = 0; i < n; ++i) {
        double* row = values.data() + i * classes;
        double top = row[0];
        for (std::size_t c = 1; c < classes; ++c)
            top = std::max(top, row[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c)
            sum += row[c] = std::exp(row[c] - top);
        for (std::size_t c = 0; c < classes; ++c)
            row[c] /= sum;
    }
    return with_values(bundle, std::move(values));
}

PredictionMatrix pool_global_argmax(const EnsembleBundle& bundle)
{
    require_members(bundle);
    const std::size_t n = bundle.sample_count();
    const std::size_t classes = bundle.class_count();
    std::vector<double> values(n * classes, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        // Class-outer scan gives the lowest class index, then the lowest
        // member index, on ties.
        std::size_t best_class = 0;
        double best = -1.0;
        for (std::size_t c = 0; c < classes; ++c)
            for (const auto& m : bundle.members)
                if (m.matrix(i, c) > best) {
                    best = m.matrix(i, c);
                    best_class = c;
                }
        values[i * classes + best_class] = best;
    }
    return with_values(bundle, std::move(values), true);
}

PredictionMatrix pool_trained(const FittedPooler& pooler, const EnsembleBundle& bundle)
{
    const auto* learner = std::get_if<LearnerModel>(&pooler.state);
    if (!learner)
        throw ParameterError("pooler '" + to_string(pooler.kind) + "' carries no learner");
    const Eigen::MatrixXd probs = predict_proba(*learner, stacking_features(bundle));
    const std::size_t n = bundle.sample_count();
    const std::size_t classes = bundle.class_count();
    std::vector<double> values(n * classes);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::RowVectorXd row = probs.row(static_cast<Eigen::Index>(i));
        const auto fixed = renormalize(std::span<const double>(row.data(), classes));
        std::copy(fixed.begin(), fixed.end(), values.begin() + static_cast<std::ptrdiff_t>(i * classes));
    }
    return with_values(bundle, std::move(values));
}

PredictionMatrix pool(const FittedPooler& pooler, const EnsembleBundle& bundle)
{
    require_members(bundle);
    if (bundle.class_count() != pooler.class_count)
        throw ShapeMismatchError("bundle has " + std::to_string(bundle.class_count()) + " classes, pooler expects " +
                                 std::to_string(pooler.class_count));
    if (!is_static(pooler.kind) && bundle.member_count() != pooler.member_count)
        throw ShapeMismatchError("bundle has " + std::to_string(bundle.member_count()) + " members, pooler expects " +
                                 std::to_string(pooler.member_count));
    switch (pooler.kind) {
    case PoolerKind::MeanUnweighted: return pool_mean_unweighted(bundle);
    case PoolerKind::MajorityVoteHard: return pool_majority_vote_hard(bundle);
    case PoolerKind::MajorityVoteSoft: return pool_majority_vote_soft(bundle);
    case PoolerKind::GlobalArgmax: return pool_global_argmax(bundle);
    case PoolerKind::MeanWeighted:
        return pool_mean_weighted(bundle, std::get<MemberWeights>(pooler.state).weights);
    case PoolerKind::BestModel: {
        const auto& m = bundle.members.at(std::get<BestMember>(pooler.state).index).matrix;
        return m;
    }
    default: return pool_trained(pooler, bundle);
    }
}

}  // namespace ensemblepool
