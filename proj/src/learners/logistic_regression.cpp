#include <cmath>

#include "ensemblepool/learners.hpp"

namespace ensemblepool {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Unpacked {
    Eigen::Map<const RowMajorMatrix> w;
    Eigen::Map<const Eigen::VectorXd> b;
};

Unpacked unpack(const Eigen::VectorXd& params, Eigen::Index classes, Eigen::Index features)
{
    return {Eigen::Map<const RowMajorMatrix>(params.data(), classes, features),
            Eigen::Map<const Eigen::VectorXd>(params.data() + classes * features, classes)};
}

// Row-wise softmax of logits, returning log-sum-exp per row in `lse`.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits, Eigen::VectorXd& lse)
{
    Eigen::MatrixXd p(logits.rows(), logits.cols());
    lse.resize(logits.rows());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        p.row(i) = (logits.row(i).array() - m).exp();
        const double s = p.row(i).sum();
        p.row(i) /= s;
        lse(i) = m + std::log(s);
    }
    return p;
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, Eigen::Index classes)
{
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    return y;
}

class Problem {
public:
    Problem(const TrainSet& train, double lambda)
        : x_(train.features), y_(one_hot(train.labels, static_cast<Eigen::Index>(train.class_count))),
          lambda_(lambda), classes_(static_cast<Eigen::Index>(train.class_count)), features_(train.features.cols())
    {
    }

    Eigen::Index dim() const { return classes_ * features_ + classes_; }

    double evaluate(const Eigen::VectorXd& params, Eigen::VectorXd* gradient)
    {
        const auto [w, b] = unpack(params, classes_, features_);
        Eigen::MatrixXd logits = x_ * w.transpose();
        logits.rowwise() += b.transpose();
        Eigen::VectorXd lse;
        probs_ = softmax_rows(logits, lse);
        const double data_loss = lse.sum() - (logits.array() * y_.array()).sum();
        const double value = data_loss + 0.5 * lambda_ * w.squaredNorm();
        if (gradient) {
            gradient->resize(dim());
            const Eigen::MatrixXd residual = probs_ - y_;
            Eigen::Map<RowMajorMatrix> gw(gradient->data(), classes_, features_);
            gw = residual.transpose() * x_ + lambda_ * w;
            gradient->tail(classes_) = residual.colwise().sum().transpose();
        }
        return value;
    }

    // Hessian-vector product at the point of the last evaluate().
    Eigen::VectorXd hessian_times(const Eigen::VectorXd& v) const
    {
        const auto [vw, vb] = unpack(v, classes_, features_);
        Eigen::MatrixXd a = x_ * vw.transpose();
        a.rowwise() += vb.transpose();
        const Eigen::VectorXd pa = (probs_.array() * a.array()).rowwise().sum();
        const Eigen::MatrixXd r = probs_.array() * (a.colwise() - pa).array();
        Eigen::VectorXd out(dim());
        Eigen::Map<RowMajorMatrix> hw(out.data(), classes_, features_);
        hw = r.transpose() * x_ + lambda_ * vw;
        out.tail(classes_) = r.colwise().sum().transpose();
        return out;
    }

private:
    const Eigen::MatrixXd& x_;
    Eigen::MatrixXd y_;
    double lambda_;
    Eigen::Index classes_;
    Eigen::Index features_;
    Eigen::MatrixXd probs_;
};

// Truncated CG on H d = -g; stops on relative residual or negative curvature.
Eigen::VectorXd newton_direction(const Problem& problem, const Eigen::VectorXd& g)
{
    const double g_norm = g.norm();
    const double target = std::min(0.5, std::sqrt(g_norm)) * g_norm;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(g.size());
    Eigen::VectorXd r = -g;
    Eigen::VectorXd p = r;
    double rr = r.squaredNorm();
    const Eigen::Index max_cg = std::max<Eigen::Index>(20, 2 * g.size());
    for (Eigen::Index it = 0; it < max_cg && std::sqrt(rr) > target; ++it) {
        const Eigen::VectorXd hp = problem.hessian_times(p);
        const double curvature = p.dot(hp);
        if (curvature <= 1e-14 * p.squaredNorm()) {
            if (it == 0)
                d = -g;
            break;
        }
        const double step = rr / curvature;
        d += step * p;
        r -= step * hp;
        const double rr_next = r.squaredNorm();
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    return d;
}

}  // namespace

double logreg_objective(const TrainSet& train, double lambda, const Eigen::VectorXd& params, Eigen::VectorXd* gradient)
{
    Problem problem(train, lambda);
    if (params.size() != problem.dim())
        throw ShapeMismatchError("logistic regression parameter vector has the wrong length");
    return problem.evaluate(params, gradient);
}

LogRegModel fit_logistic_regression(const TrainSet& train, const LogRegOptions& options)
{
    train.validate();
    if (!(options.lambda > 0.0))
        throw ParameterError("logistic regression needs lambda > 0");
    Problem problem(train, options.lambda);
    const auto classes = static_cast<Eigen::Index>(train.class_count);
    const Eigen::Index features = train.features.cols();

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(problem.dim());
    Eigen::VectorXd g;
    double value = problem.evaluate(theta, &g);
    LogRegModel model;
    for (; model.iterations < options.max_iter; ++model.iterations) {
        if (g.lpNorm<Eigen::Infinity>() < options.tolerance) {
            model.converged = true;
            break;
        }
        const Eigen::VectorXd d = newton_direction(problem, g);
        const double slope = g.dot(d);
        double step = 1.0;
        Eigen::VectorXd candidate;
        double candidate_value = value;
        for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
            candidate = theta + step * d;
            candidate_value = problem.evaluate(candidate, nullptr);
            if (candidate_value <= value + 1e-4 * step * slope)
                break;
        }
        if (!(candidate_value <= value))
            break;  // no decrease possible at machine precision
        theta = candidate;
        value = problem.evaluate(theta, &g);
    }
    model.gradient_norm = g.lpNorm<Eigen::Infinity>();
    model.converged = model.converged || model.gradient_norm < options.tolerance;
    const auto [w, b] = unpack(theta, classes, features);
    model.weights = w;
    model.bias = b;
    return model;
}

}  // namespace ensemblepool
