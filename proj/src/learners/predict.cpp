#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ensemblepool/learners.hpp"

namespace ensemblepool {

void TrainSet::validate() const
{
    if (static_cast<std::size_t>(features.rows()) != labels.size())
        throw ShapeMismatchError("training features and labels differ in length");
    if (labels.size() < 2)
        throw ParameterError("training needs at least 2 samples");
    if (features.cols() < 1)
        throw ShapeMismatchError("training needs at least one feature");
    if (!features.allFinite())
        throw ParameterError("training features must be finite");
    std::set<int> distinct;
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= class_count)
            throw ParameterError("training label " + std::to_string(l) + " outside [0, " +
                                 std::to_string(class_count) + ")");
        distinct.insert(l);
    }
    if (distinct.size() < 2)
        throw DegenerateLabelsError("training labels contain fewer than 2 distinct classes");
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void softmax_in_place(Eigen::MatrixXd& scores)
{
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double m = scores.row(i).maxCoeff();
        scores.row(i) = (scores.row(i).array() - m).exp();
        scores.row(i) /= scores.row(i).sum();
    }
}

Eigen::MatrixXd predict_tree(const TreeModel& model, const Eigen::MatrixXd& x)
{
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(model.class_count));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const TreeNode* node = &model.nodes.front();
        while (!node->is_leaf())
            node = &model.nodes[static_cast<std::size_t>(x(i, node->feature) <= node->threshold ? node->left
                                                                                                  : node->right)];
        double total = 0.0;
        for (double c : node->class_counts)
            total += c;
        for (std::size_t c = 0; c < model.class_count; ++c)
            out(i, static_cast<Eigen::Index>(c)) = node->class_counts[c] / total;
    }
    return out;
}

Eigen::MatrixXd predict_logreg(const LogRegModel& model, const Eigen::MatrixXd& x)
{
    Eigen::MatrixXd logits = x * model.weights.transpose();
    logits.rowwise() += model.bias.transpose();
    softmax_in_place(logits);
    return logits;
}

Eigen::MatrixXd predict_cnb(const CnbModel& model, const Eigen::MatrixXd& x)
{
    Eigen::MatrixXd negated = -(x * model.weights.transpose());
    softmax_in_place(negated);
    return negated;
}

Eigen::MatrixXd predict_svm(const SvmModel& model, const Eigen::MatrixXd& x)
{
    Eigen::MatrixXd votes = Eigen::MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(model.class_count));
    for (const auto& pair : model.pairs) {
        const Eigen::MatrixXd k = rbf_kernel(x, pair.support_vectors, model.gamma);
        const Eigen::VectorXd dec = (k * pair.coefficients).array() - pair.rho;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            votes(i, dec(i) > 0.0 ? pair.positive : pair.negative) += 1.0;
    }
    return votes / static_cast<double>(model.pairs.size());
}

Eigen::MatrixXd predict_knn(const KnnModel& model, const Eigen::MatrixXd& x)
{
    const auto n = static_cast<std::size_t>(model.features.rows());
    const std::size_t k = std::min(n, static_cast<std::size_t>(model.k));
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(model.class_count));
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j)
            dist[j] = {(model.features.row(static_cast<Eigen::Index>(j)) - x.row(i)).squaredNorm(), j};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        for (std::size_t r = 0; r < k; ++r)
            out(i, model.labels[dist[r].second]) += 1.0;
    }
    return out / static_cast<double>(k);
}

Eigen::MatrixXd predict_gp(const GpModel& model, const Eigen::MatrixXd& x)
{
    const double gamma = 1.0 / (2.0 * model.length_scale * model.length_scale);
    const Eigen::MatrixXd k_star = rbf_kernel(model.inputs, x, gamma);  // N x M
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(model.class_count));
    for (std::size_t c = 0; c < model.class_count; ++c) {
        const auto& gp = model.per_class[c];
        const Eigen::VectorXd mean = k_star.transpose() * gp.grad_log_lik;
        const Eigen::MatrixXd v =
            gp.chol.triangularView<Eigen::Lower>().solve(gp.sqrt_w.asDiagonal() * k_star);
        const Eigen::VectorXd var = (1.0 - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double z = mean(i) / std::sqrt(1.0 + std::numbers::pi * var(i) / 8.0);
            out(i, static_cast<Eigen::Index>(c)) = 1.0 / (1.0 + std::exp(-z));
        }
    }
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        out.row(i) /= out.row(i).sum();
    return out;
}

}  // namespace

std::size_t feature_count(const LearnerModel& model)
{
    return std::visit(Overloaded{
                          [](const TreeModel& m) { return m.feature_count; },
                          [](const LogRegModel& m) { return static_cast<std::size_t>(m.weights.cols()); },
                          [](const CnbModel& m) { return static_cast<std::size_t>(m.weights.cols()); },
                          [](const SvmModel& m) { return m.feature_count; },
                          [](const KnnModel& m) { return static_cast<std::size_t>(m.features.cols()); },
                          [](const GpModel& m) { return static_cast<std::size_t>(m.inputs.cols()); },
                      },
                      model);
}

std::size_t class_count(const LearnerModel& model)
{
    return std::visit(Overloaded{
                          [](const TreeModel& m) { return m.class_count; },
                          [](const LogRegModel& m) { return static_cast<std::size_t>(m.weights.rows()); },
                          [](const CnbModel& m) { return static_cast<std::size_t>(m.weights.rows()); },
                          [](const SvmModel& m) { return m.class_count; },
                          [](const KnnModel& m) { return m.class_count; },
                          [](const GpModel& m) { return m.class_count; },
                      },
                      model);
}

Eigen::MatrixXd predict_proba(const LearnerModel& model, const Eigen::MatrixXd& features)
{
    if (static_cast<std::size_t>(features.cols()) != feature_count(model))
        throw ShapeMismatchError("query has " + std::to_string(features.cols()) + " features, model expects " +
                                 std::to_string(feature_count(model)));
    return std::visit(Overloaded{
                          [&](const TreeModel& m) { return predict_tree(m, features); },
                          [&](const LogRegModel& m) { return predict_logreg(m, features); },
                          [&](const CnbModel& m) { return predict_cnb(m, features); },
                          [&](const SvmModel& m) { return predict_svm(m, features); },
                          [&](const KnnModel& m) { return predict_knn(m, features); },
                          [&](const GpModel& m) { return predict_gp(m, features); },
                      },
                      model);
}

}  // namespace ensemblepool
