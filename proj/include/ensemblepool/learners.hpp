#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ensemblepool/core.hpp"

namespace ensemblepool {

class NegativeFeatureError : public Error {
public:
    using Error::Error;
};

class SizeGuardError : public Error {
public:
    using Error::Error;
};

class DegenerateLabelsError : public Error {
public:
    using Error::Error;
};

/// Dense training data for the stacking learners. Rows are samples.
struct TrainSet {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::size_t class_count = 0;

    std::size_t sample_count() const { return labels.size(); }
    std::size_t feature_count() const { return static_cast<std::size_t>(features.cols()); }

    /// Throws ShapeMismatchError, ParameterError or DegenerateLabelsError
    /// unless N >= 2, labels are in range and at least two classes occur.
    void validate() const;
};

// ---------------------------------------------------------------- tree

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;  // x[feature] <= threshold
    int right = -1;
    std::vector<double> class_counts;

    bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
    std::size_t feature_count = 0;
    std::size_t class_count = 0;
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::size_t depth() const;
};

/// Gini impurity 1 - sum p_c^2 of a class-count vector.
double gini_impurity(std::span<const double> class_counts);

/// CART with Gini impurity decrease. `max_depth` empty means unlimited.
TreeModel fit_decision_tree(const TrainSet& train, std::optional<int> max_depth = std::nullopt);

// ---------------------------------------------------------------- logistic regression

struct LogRegOptions {
    double lambda = 1.0;
    double tolerance = 1e-6;
    int max_iter = 100;
};

struct LogRegModel {
    Eigen::MatrixXd weights;  // C x F
    Eigen::VectorXd bias;     // C
    int iterations = 0;
    double gradient_norm = 0.0;  // infinity norm at the returned iterate
    bool converged = false;
};

/// Objective of multinomial logistic regression with L2 on the weights:
/// sum of per-sample cross-entropy + lambda/2 * ||W||^2. `params` packs
/// W row-major followed by b. Fills `gradient` when non-null.
double logreg_objective(const TrainSet& train, double lambda, const Eigen::VectorXd& params,
                        Eigen::VectorXd* gradient = nullptr);

/// Newton iterations with conjugate-gradient inner solves on exact
/// Hessian-vector products.
LogRegModel fit_logistic_regression(const TrainSet& train, const LogRegOptions& options = {});

// ---------------------------------------------------------------- complement naive bayes

struct CnbModel {
    Eigen::MatrixXd complement_counts;  // C x F, summed features of samples outside class c
    Eigen::MatrixXd weights;            // C x F, normalized complement log-weights
    double alpha = 1.0;
};

/// Rennie et al. complement naive Bayes with weight normalization.
CnbModel fit_complement_nb(const TrainSet& train, double alpha = 1.0);

/// Per-class scores sum_i x_i w_ci; the predicted class is the minimum.
Eigen::VectorXd cnb_scores(const CnbModel& model, const Eigen::VectorXd& x);

// ---------------------------------------------------------------- svm

struct SvmOptions {
    double c_reg = 1.0;
    std::optional<double> gamma;  // default 1 / F
    double tolerance = 1e-3;
    long max_iter = 100000;
};

/// One one-vs-one subproblem: class `positive` (+1) against `negative` (-1).
struct SvmPair {
    int positive = 0;
    int negative = 0;
    Eigen::MatrixXd support_vectors;
    Eigen::VectorXd coefficients;  // alpha_i * y_i of each support vector
    double rho = 0.0;              // decision value is sum coef_i K(sv_i, x) - rho
    double dual_objective = 0.0;   // 1/2 a'Qa - e'a at termination
    double kkt_gap = 0.0;          // maximal violating pair gap at termination
    double alpha_dot_y = 0.0;
    long iterations = 0;
    bool converged = false;
};

struct SvmModel {
    std::size_t feature_count = 0;
    std::size_t class_count = 0;
    double gamma = 1.0;
    double c_reg = 1.0;
    std::vector<SvmPair> pairs;

    double decision_value(const SvmPair& pair, const Eigen::VectorXd& x) const;
};

/// Result of the dual C-SVC solver on a precomputed kernel.
struct SvmDualSolution {
    Eigen::VectorXd alpha;
    double rho = 0.0;
    double objective = 0.0;
    double kkt_gap = 0.0;
    long iterations = 0;
    bool converged = false;
};

/// SMO with second-order working set selection on
/// min 1/2 a'Qa - e'a, 0 <= a <= c_reg, y'a = 0, Q_ij = y_i y_j K_ij.
SvmDualSolution solve_svm_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y, double c_reg,
                               double tolerance, long max_iter);

/// RBF C-SVC, one-vs-one over the class pairs that occur in training.
SvmModel fit_svm(const TrainSet& train, const SvmOptions& options = {});

// ---------------------------------------------------------------- knn

struct KnnModel {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::size_t class_count = 0;
    int k = 5;
};

KnnModel fit_knn(const TrainSet& train, int k = 5);

// ---------------------------------------------------------------- gaussian process

struct GpBinary {
    Eigen::VectorXd mode;             // posterior mode f
    Eigen::VectorXd grad_log_lik;     // d log p(y|f) / df at the mode
    Eigen::VectorXd sqrt_w;           // sqrt of the negative log-likelihood Hessian diagonal
    Eigen::MatrixXd chol;             // lower Cholesky factor of I + W^1/2 K W^1/2
    std::vector<double> objective_trace;  // Laplace objective at f = 0, then after each Newton step
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct GpModel {
    Eigen::MatrixXd inputs;
    double length_scale = 1.0;
    std::size_t class_count = 0;
    std::vector<GpBinary> per_class;  // one-vs-rest
};

inline constexpr std::size_t kGpMaxSamples = 5000;
/// Relative rounding slack tolerated when checking objective ascent.
inline constexpr double kGpObjectiveSlack = 1e-12;

/// Laplace-approximation mode of a binary GP classifier with logistic
/// likelihood; targets are +1 / -1.
GpBinary fit_gp_binary(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& targets, double tolerance = 1e-8,
                       int max_iter = 100);

/// Laplace objective -1/2 f'K^-1 f + log p(y|f) expressed through a = K^-1 f.
double gp_laplace_objective(const Eigen::VectorXd& f, const Eigen::VectorXd& a, const Eigen::VectorXd& targets);

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

GpModel fit_gp_classifier(const TrainSet& train, double length_scale = 1.0);

// ---------------------------------------------------------------- common

using LearnerModel = std::variant<TreeModel, LogRegModel, CnbModel, SvmModel, KnnModel, GpModel>;

std::size_t feature_count(const LearnerModel& model);
std::size_t class_count(const LearnerModel& model);

/// N x C class probabilities; every row sums to 1.
Eigen::MatrixXd predict_proba(const LearnerModel& model, const Eigen::MatrixXd& features);

}  // namespace ensemblepool
