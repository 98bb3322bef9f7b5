#include <cmath>

#include "ensemblepool/learners.hpp"

namespace ensemblepool {

CnbModel fit_complement_nb(const TrainSet& train, double alpha)
{
    train.validate();
    if (!(alpha > 0.0))
        throw ParameterError("complement naive Bayes needs alpha > 0");
    if ((train.features.array() < 0.0).any())
        throw NegativeFeatureError("complement naive Bayes needs non-negative features");

    const auto classes = static_cast<Eigen::Index>(train.class_count);
    const Eigen::Index features = train.features.cols();
    Eigen::MatrixXd per_class = Eigen::MatrixXd::Zero(classes, features);
    for (std::size_t i = 0; i < train.labels.size(); ++i)
        per_class.row(train.labels[i]) += train.features.row(static_cast<Eigen::Index>(i));
    const Eigen::RowVectorXd total = per_class.colwise().sum();

    CnbModel model;
    model.alpha = alpha;
    model.complement_counts = (-per_class).rowwise() + total;
    model.weights.resize(classes, features);
    for (Eigen::Index c = 0; c < classes; ++c) {
        const double denom = alpha * static_cast<double>(features) + model.complement_counts.row(c).sum();
        Eigen::RowVectorXd w = ((model.complement_counts.row(c).array() + alpha) / denom).log();
        const double norm = w.cwiseAbs().sum();
        if (norm > 0.0)
            w /= norm;
        model.weights.row(c) = w;
    }
    return model;
}

Eigen::VectorXd cnb_scores(const CnbModel& model, const Eigen::VectorXd& x)
{
    if (x.size() != model.weights.cols())
        throw ShapeMismatchError("complement naive Bayes query has the wrong feature count");
    return model.weights * x;
}

}  // namespace ensemblepool
