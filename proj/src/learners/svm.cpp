#include <cmath>
#include <limits>

#include "ensemblepool/learners.hpp"

namespace ensemblepool {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma)
{
    const Eigen::VectorXd an = a.rowwise().squaredNorm();
    const Eigen::VectorXd bn = b.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * a * b.transpose();
    d2.colwise() += an;
    d2.rowwise() += bn.transpose();
    return (-gamma * d2.cwiseMax(0.0)).array().exp();
}

SvmDualSolution solve_svm_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y, double c_reg,
                               double tolerance, long max_iter)
{
    const Eigen::Index n = y.size();
    if (kernel.rows() != n || kernel.cols() != n)
        throw ShapeMismatchError("svm dual: kernel and targets disagree in size");
    SvmDualSolution sol;
    sol.alpha = Eigen::VectorXd::Zero(n);
    auto& alpha = sol.alpha;
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);  // Q alpha - e

    auto in_up = [&](Eigen::Index t) { return (y(t) > 0 && alpha(t) < c_reg) || (y(t) < 0 && alpha(t) > 0); };
    auto in_low = [&](Eigen::Index t) { return (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < c_reg); };

    for (;;) {
        // Working set by second-order selection (Fan, Chen and Lin).
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t)
            if (in_up(t) && -y(t) * grad(t) > g_max) {
                g_max = -y(t) * grad(t);
                i = t;
            }
        Eigen::Index j = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!in_low(t))
                continue;
            const double v = -y(t) * grad(t);
            g_min = std::min(g_min, v);
            if (i < 0 || v >= g_max)
                continue;
            const double b = g_max - v;
            double a = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
            if (a <= 0.0)
                a = kTau;
            if (-(b * b) / a < best) {
                best = -(b * b) / a;
                j = t;
            }
        }
        sol.kkt_gap = (i < 0 || !std::isfinite(g_min)) ? 0.0 : g_max - g_min;
        if (i < 0 || j < 0 || sol.kkt_gap < tolerance) {
            sol.converged = true;
            break;
        }
        if (sol.iterations >= max_iter)
            break;
        ++sol.iterations;

        const double q_ij = y(i) * y(j) * kernel(i, j);
        const double old_i = alpha(i);
        const double old_j = alpha(j);
        if (y(i) != y(j)) {
            double quad = kernel(i, i) + kernel(j, j) + 2.0 * q_ij;
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (-grad(i) - grad(j)) / quad;
            const double diff = alpha(i) - alpha(j);
            alpha(i) += delta;
            alpha(j) += delta;
            if (diff > 0.0) {
                if (alpha(j) < 0.0) {
                    alpha(j) = 0.0;
                    alpha(i) = diff;
                }
            } else if (alpha(i) < 0.0) {
                alpha(i) = 0.0;
                alpha(j) = -diff;
            }
            if (diff > 0.0) {
                if (alpha(i) > c_reg) {
                    alpha(i) = c_reg;
                    alpha(j) = c_reg - diff;
                }
            } else if (alpha(j) > c_reg) {
                alpha(j) = c_reg;
                alpha(i) = c_reg + diff;
            }
        } else {
            double quad = kernel(i, i) + kernel(j, j) - 2.0 * q_ij;
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (grad(i) - grad(j)) / quad;
            const double sum = alpha(i) + alpha(j);
            alpha(i) -= delta;
            alpha(j) += delta;
            if (sum > c_reg) {
                if (alpha(i) > c_reg) {
                    alpha(i) = c_reg;
                    alpha(j) = sum - c_reg;
                }
            } else if (alpha(j) < 0.0) {
                alpha(j) = 0.0;
                alpha(i) = sum;
            }
            if (sum > c_reg) {
                if (alpha(j) > c_reg) {
                    alpha(j) = c_reg;
                    alpha(i) = sum - c_reg;
                }
            } else if (alpha(i) < 0.0) {
                alpha(i) = 0.0;
                alpha(j) = sum;
            }
        }
        const double d_i = alpha(i) - old_i;
        const double d_j = alpha(j) - old_j;
        for (Eigen::Index t = 0; t < n; ++t)
            grad(t) += y(t) * (y(i) * kernel(t, i) * d_i + y(j) * kernel(t, j) * d_j);
    }

    // Offset: average over free variables, midpoint of the feasible range otherwise.
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = y(t) * grad(t);
        if (alpha(t) >= c_reg) {
            if (y(t) < 0) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else if (alpha(t) <= 0.0) {
            if (y(t) > 0) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    sol.rho = free_count > 0 ? free_sum / free_count : (upper + lower) / 2.0;
    sol.objective = 0.5 * alpha.dot(grad - Eigen::VectorXd::Ones(n));
    return sol;
}

double SvmModel::decision_value(const SvmPair& pair, const Eigen::VectorXd& x) const
{
    const Eigen::VectorXd k = rbf_kernel(pair.support_vectors, x.transpose(), gamma).col(0);
    return pair.coefficients.dot(k) - pair.rho;
}

SvmModel fit_svm(const TrainSet& train, const SvmOptions& options)
{
    train.validate();
    if (!(options.c_reg > 0.0))
        throw ParameterError("svm needs C > 0");
    SvmModel model;
    model.feature_count = train.feature_count();
    model.class_count = train.class_count;
    model.c_reg = options.c_reg;
    model.gamma = options.gamma.value_or(1.0 / static_cast<double>(train.feature_count()));
    if (!(model.gamma > 0.0))
        throw ParameterError("svm needs gamma > 0");

    std::vector<std::vector<Eigen::Index>> by_class(train.class_count);
    for (std::size_t i = 0; i < train.labels.size(); ++i)
        by_class[static_cast<std::size_t>(train.labels[i])].push_back(static_cast<Eigen::Index>(i));

    for (std::size_t a = 0; a < train.class_count; ++a) {
        for (std::size_t b = a + 1; b < train.class_count; ++b) {
            if (by_class[a].empty() || by_class[b].empty())
                continue;
            std::vector<Eigen::Index> rows(by_class[a]);
            rows.insert(rows.end(), by_class[b].begin(), by_class[b].end());
            const auto n = static_cast<Eigen::Index>(rows.size());
            Eigen::MatrixXd x(n, train.features.cols());
            Eigen::VectorXd y(n);
            for (Eigen::Index r = 0; r < n; ++r) {
                x.row(r) = train.features.row(rows[static_cast<std::size_t>(r)]);
                y(r) = r < static_cast<Eigen::Index>(by_class[a].size()) ? 1.0 : -1.0;
            }
            const auto sol =
                solve_svm_dual(rbf_kernel(x, x, model.gamma), y, options.c_reg, options.tolerance, options.max_iter);

            SvmPair pair;
            pair.positive = static_cast<int>(a);
            pair.negative = static_cast<int>(b);
            pair.rho = sol.rho;
            pair.dual_objective = sol.objective;
            pair.kkt_gap = sol.kkt_gap;
            pair.iterations = sol.iterations;
            pair.converged = sol.converged;
            pair.alpha_dot_y = sol.alpha.dot(y);
            const Eigen::Index sv_count = (sol.alpha.array() > 0.0).count();
            pair.support_vectors.resize(sv_count, x.cols());
            pair.coefficients.resize(sv_count);
            Eigen::Index k = 0;
            for (Eigen::Index r = 0; r < n; ++r)
                if (sol.alpha(r) > 0.0) {
                    pair.support_vectors.row(k) = x.row(r);
                    pair.coefficients(k) = sol.alpha(r) * y(r);
                    ++k;
                }
            model.pairs.push_back(std::move(pair));
        }
    }
    return model;
}

}  // namespace ensemblepool
