#include <cmath>

#include "ensemblepool/learners.hpp"

namespace ensemblepool {

namespace {

double log_sigmoid(double z)
{
    return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z)
{
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

struct LikelihoodTerms {
    double log_lik = 0.0;
    Eigen::VectorXd grad;  // t - pi
    Eigen::VectorXd w;     // pi (1 - pi)
};

LikelihoodTerms likelihood(const Eigen::VectorXd& f, const Eigen::VectorXd& targets)
{
    LikelihoodTerms out;
    out.grad.resize(f.size());
    out.w.resize(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        out.log_lik += log_sigmoid(targets(i) * f(i));
        const double pi = sigmoid(f(i));
        out.grad(i) = (targets(i) + 1.0) / 2.0 - pi;
        out.w(i) = pi * (1.0 - pi);
    }
    return out;
}

}  // namespace

double gp_laplace_objective(const Eigen::VectorXd& f, const Eigen::VectorXd& a, const Eigen::VectorXd& targets)
{
    double log_lik = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        log_lik += log_sigmoid(targets(i) * f(i));
    return -0.5 * a.dot(f) + log_lik;
}

GpBinary fit_gp_binary(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& targets, double tolerance, int max_iter)
{
    const Eigen::Index n = targets.size();
    // f = K a throughout, so the objective gradient is grad log p(y|f) - a.
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    GpBinary out;
    auto terms = likelihood(f, targets);
    double objective = gp_laplace_objective(f, a, targets);
    out.objective_trace.push_back(objective);
    for (;;) {
        out.gradient_norm = (terms.grad - a).lpNorm<Eigen::Infinity>();
        if (out.gradient_norm < tolerance) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_iter)
            break;
        ++out.iterations;

        const Eigen::VectorXd sw = terms.w.cwiseSqrt();
        Eigen::MatrixXd b = sw.asDiagonal() * kernel * sw.asDiagonal();
        b.diagonal().array() += 1.0;
        const Eigen::LLT<Eigen::MatrixXd> llt(b);
        const Eigen::VectorXd rhs = terms.w.cwiseProduct(f) + terms.grad;
        const Eigen::VectorXd a_newton =
            rhs - sw.cwiseProduct(llt.solve(sw.cwiseProduct(kernel * rhs)));

        // Step halving along a keeps the objective monotone up to rounding.
        const double slack = kGpObjectiveSlack * (1.0 + std::abs(objective));
        Eigen::VectorXd step = a_newton - a;
        double next_objective = objective;
        Eigen::VectorXd a_next, f_next;
        for (int halvings = 0; halvings < 50; ++halvings, step *= 0.5) {
            a_next = a + step;
            f_next = kernel * a_next;
            next_objective = gp_laplace_objective(f_next, a_next, targets);
            if (next_objective >= objective - slack)
                break;
        }
        if (!(next_objective >= objective - slack))
            break;
        a = std::move(a_next);
        f = std::move(f_next);
        objective = next_objective;
        out.objective_trace.push_back(objective);
        terms = likelihood(f, targets);
    }

    out.mode = f;
    out.grad_log_lik = terms.grad;
    out.sqrt_w = terms.w.cwiseSqrt();
    Eigen::MatrixXd b = out.sqrt_w.asDiagonal() * kernel * out.sqrt_w.asDiagonal();
    b.diagonal().array() += 1.0;
    out.chol = Eigen::LLT<Eigen::MatrixXd>(b).matrixL();
    return out;
}

GpModel fit_gp_classifier(const TrainSet& train, double length_scale)
{
    train.validate();
    if (train.sample_count() > kGpMaxSamples)
        throw SizeGuardError("Gaussian process classifier is limited to " + std::to_string(kGpMaxSamples) +
                             " training samples");
    if (!(length_scale > 0.0))
        throw ParameterError("Gaussian process length scale must be positive");
    GpModel model;
    model.inputs = train.features;
    model.length_scale = length_scale;
    model.class_count = train.class_count;
    const Eigen::MatrixXd kernel =
        rbf_kernel(train.features, train.features, 1.0 / (2.0 * length_scale * length_scale));
    const auto n = static_cast<Eigen::Index>(train.sample_count());
    model.per_class.resize(train.class_count);
    parallel_for(train.class_count, [&](std::size_t c) {
        Eigen::VectorXd targets(n);
        for (Eigen::Index i = 0; i < n; ++i)
            targets(i) = train.labels[static_cast<std::size_t>(i)] == static_cast<int>(c) ? 1.0 : -1.0;
        model.per_class[c] = fit_gp_binary(kernel, targets);
    });
    return model;
}

}  // namespace ensemblepool
