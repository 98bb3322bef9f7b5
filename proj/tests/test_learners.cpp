#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ensemblepool/learners.hpp"
#include "oracles.hpp"

using namespace ensemblepool;

namespace {

TrainSet blobs(std::uint64_t seed, std::size_t n, std::size_t classes, std::size_t features, double spread = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    TrainSet t;
    t.class_count = classes;
    t.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
    for (std::size_t i = 0; i < n; ++i) {
        const int y = static_cast<int>(i % classes);
        t.labels.push_back(y);
        for (std::size_t f = 0; f < features; ++f)
            t.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) =
                noise(rng) + (f % classes == static_cast<std::size_t>(y) ? 2.0 : 0.0);
    }
    return t;
}

double training_accuracy(const LearnerModel& model, const TrainSet& t)
{
    const Eigen::MatrixXd p = predict_proba(model, t.features);
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        Eigen::Index top;
        p.row(i).maxCoeff(&top);
        hits += top == t.labels[static_cast<std::size_t>(i)];
    }
    return static_cast<double>(hits) / static_cast<double>(p.rows());
}

void check_rows_normalized(const Eigen::MatrixXd& p)
{
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.row(i).minCoeff() >= 0.0);
    }
}

}  // namespace

TEST_CASE("train sets are validated")
{
    TrainSet t = blobs(1, 6, 2, 2);
    t.labels.pop_back();
    CHECK_THROWS(fit_decision_tree(t));
    TrainSet bad = blobs(1, 6, 2, 2);
    bad.labels[0] = 5;
    CHECK_THROWS(fit_logistic_regression(bad));
}

TEST_CASE("gini impurity")
{
    CHECK(gini_impurity(std::vector<double>{5, 5}) == doctest::Approx(0.5));
    CHECK(gini_impurity(std::vector<double>{4, 0}) == 0.0);
    CHECK(gini_impurity(std::vector<double>{1, 1, 1, 1}) == doctest::Approx(0.75));
    CHECK(gini_impurity(std::vector<double>{0, 0}) == 0.0);
}

TEST_CASE("tree finds the separating midpoint on a six-point line")
{
    TrainSet t;
    t.class_count = 2;
    t.features.resize(6, 1);
    t.features << 1, 2, 3, 4, 5, 6;
    t.labels = {0, 0, 0, 1, 1, 1};
    const auto tree = fit_decision_tree(t);
    const auto& root = tree.nodes.front();
    CHECK(root.feature == 0);
    CHECK(root.threshold == 3.5);
    const auto& l = tree.nodes[static_cast<std::size_t>(root.left)];
    const auto& r = tree.nodes[static_cast<std::size_t>(root.right)];
    const double decrease = gini_impurity(root.class_counts) - 0.5 * gini_impurity(l.class_counts) -
                            0.5 * gini_impurity(r.class_counts);
    CHECK(decrease == doctest::Approx(0.5));
    CHECK(tree.depth() == 1);
}

TEST_CASE("tree split matches brute-force search over thresholds")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        TrainSet t;
        t.class_count = 3;
        t.features.resize(12, 2);
        for (Eigen::Index i = 0; i < 12; ++i) {
            t.features(i, 0) = static_cast<double>(rng() % 20);
            t.features(i, 1) = static_cast<double>(rng() % 20);
            t.labels.push_back(static_cast<int>(rng() % 3));
        }
        if (std::set<int>(t.labels.begin(), t.labels.end()).size() < 2)
            continue;
        double best = -1.0;
        int best_f = -1;
        double best_thr = 0.0;
        for (int f = 0; f < 2; ++f) {
            std::set<double> values(t.features.col(f).data(), t.features.col(f).data() + 12);
            std::vector<double> v(values.begin(), values.end());
            for (std::size_t k = 0; k + 1 < v.size(); ++k) {
                const double thr = 0.5 * (v[k] + v[k + 1]);
                std::vector<double> lc(3, 0.0), rc(3, 0.0), all(3, 0.0);
                for (Eigen::Index i = 0; i < 12; ++i) {
                    (t.features(i, f) <= thr ? lc : rc)[static_cast<std::size_t>(t.labels[i])] += 1.0;
                    all[static_cast<std::size_t>(t.labels[i])] += 1.0;
                }
                const double nl = lc[0] + lc[1] + lc[2], nr = rc[0] + rc[1] + rc[2];
                const double dec = gini_impurity(all) - nl / 12.0 * gini_impurity(lc) - nr / 12.0 * gini_impurity(rc);
                if (dec > best + 1e-12) {
                    best = dec;
                    best_f = f;
                    best_thr = thr;
                }
            }
        }
        const auto tree = fit_decision_tree(t);
        CHECK(tree.nodes.front().feature == best_f);
        CHECK(tree.nodes.front().threshold == best_thr);
    }
}

TEST_CASE("unlimited tree fits consistent data exactly; depth limit holds")
{
    const auto t = blobs(5, 150, 4, 3, 1.5);
    const LearnerModel full = fit_decision_tree(t);
    CHECK(training_accuracy(full, t) == 1.0);
    const auto stump = fit_decision_tree(t, 2);
    CHECK(stump.depth() <= 2);
    check_rows_normalized(predict_proba(LearnerModel{stump}, t.features));
}

TEST_CASE("logistic regression objective gradient matches finite differences")
{
    const auto t = blobs(7, 30, 3, 4);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 0.5);
    Eigen::VectorXd params(3 * 4 + 3);
    for (Eigen::Index i = 0; i < params.size(); ++i)
        params(i) = g(rng);
    Eigen::VectorXd grad;
    logreg_objective(t, 0.7, params, &grad);
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        Eigen::VectorXd up = params, down = params;
        up(i) += 1e-6;
        down(i) -= 1e-6;
        const double fd = (logreg_objective(t, 0.7, up) - logreg_objective(t, 0.7, down)) / 2e-6;
        CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("logistic regression reaches the optimum found by gradient descent")
{
    const auto t = blobs(9, 40, 3, 3, 1.2);
    const auto model = fit_logistic_regression(t);
    CHECK(model.converged);
    CHECK(model.gradient_norm < 1e-5);
    const auto ref = oracle::logreg_gradient_descent(t.features, t.labels, 3, 1.0, 200000);
    CHECK(ref.gradient_norm < 1e-9);
    CHECK((model.weights - ref.w).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((model.bias - ref.b).cwiseAbs().maxCoeff() < 1e-3);
    check_rows_normalized(predict_proba(LearnerModel{model}, t.features));
}

TEST_CASE("complement naive Bayes matches the direct formula")
{
    TrainSet t;
    t.class_count = 3;
    t.features.resize(4, 3);
    t.features << 1, 0, 2,
                  0, 3, 1,
                  2, 1, 0,
                  4, 0, 1;
    t.labels = {0, 1, 2, 0};
    const auto model = fit_complement_nb(t, 1.0);
    const Eigen::MatrixXd expected = oracle::cnb_weights(t.features, t.labels, 3, 1.0);
    CHECK((model.weights - expected).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::VectorXd x = t.features.row(1).transpose();
    const Eigen::VectorXd s = cnb_scores(model, x);
    for (int c = 0; c < 3; ++c)
        CHECK(s(c) == doctest::Approx(expected.row(c).dot(x)).epsilon(1e-12));
    t.features(0, 0) = -1.0;
    CHECK_THROWS_AS(fit_complement_nb(t), NegativeFeatureError);
}

TEST_CASE("SVM dual solution is feasible and optimal")
{
    const auto t = blobs(11, 20, 2, 2, 1.5);
    Eigen::VectorXd y(20);
    for (Eigen::Index i = 0; i < 20; ++i)
        y(i) = t.labels[static_cast<std::size_t>(i)] == 0 ? 1.0 : -1.0;
    const Eigen::MatrixXd k = rbf_kernel(t.features, t.features, 0.5);
    const auto sol = solve_svm_dual(k, y, 1.0, 1e-3, 100000);
    CHECK(sol.converged);
    CHECK(std::abs(sol.alpha.dot(y)) <= 1e-9);
    CHECK(sol.alpha.minCoeff() >= 0.0);
    CHECK(sol.alpha.maxCoeff() <= 1.0);
    CHECK(sol.kkt_gap < 1e-3);
    const auto ref = oracle::svm_dual_projected_gradient(k, y, 1.0, 200000);
    const Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(k);
    CHECK(std::abs(sol.objective - oracle::svm_dual_objective(q, ref)) <= 1e-4);
    CHECK(sol.objective == doctest::Approx(oracle::svm_dual_objective(q, sol.alpha)).epsilon(1e-10));
}

TEST_CASE("multiclass SVM separates well-spread blobs")
{
    const auto t = blobs(12, 60, 3, 3, 0.5);
    const auto model = fit_svm(t);
    CHECK(model.pairs.size() == 3);
    CHECK(training_accuracy(LearnerModel{model}, t) > 0.95);
    check_rows_normalized(predict_proba(LearnerModel{model}, t.features));
}

TEST_CASE("kNN agrees with brute-force neighbour voting")
{
    const auto t = blobs(13, 30, 3, 2, 1.5);
    const auto model = fit_knn(t, 5);
    const auto q = blobs(14, 10, 3, 2, 1.5);
    const Eigen::MatrixXd p = predict_proba(LearnerModel{model}, q.features);
    for (Eigen::Index i = 0; i < q.features.rows(); ++i) {
        std::vector<std::pair<double, int>> d;
        for (Eigen::Index j = 0; j < t.features.rows(); ++j)
            d.push_back({(t.features.row(j) - q.features.row(i)).norm(), static_cast<int>(j)});
        std::sort(d.begin(), d.end());
        std::vector<double> votes(3, 0.0);
        for (int r = 0; r < 5; ++r)
            votes[static_cast<std::size_t>(t.labels[static_cast<std::size_t>(d[r].second)])] += 0.2;
        for (int c = 0; c < 3; ++c)
            CHECK(p(i, c) == doctest::Approx(votes[static_cast<std::size_t>(c)]));
    }
    CHECK_THROWS_AS(fit_knn(t, 0), ParameterError);
    // k larger than the training set is clamped.
    const auto wide = fit_knn(t, 100);
    check_rows_normalized(predict_proba(LearnerModel{wide}, q.features));
}

TEST_CASE("GP Laplace mode matches the fixed-point oracle")
{
    const auto t = blobs(15, 20, 2, 2, 1.0);
    Eigen::VectorXd y(20);
    for (Eigen::Index i = 0; i < 20; ++i)
        y(i) = t.labels[static_cast<std::size_t>(i)] == 0 ? 1.0 : -1.0;
    const Eigen::MatrixXd k = rbf_kernel(t.features, t.features, 0.5);
    const auto gp = fit_gp_binary(k, y);
    CHECK(gp.converged);
    CHECK(gp.gradient_norm < 1e-8);
    const auto ref = oracle::gp_mode_fixed_point(k, y, 1000000);
    CHECK((gp.mode - ref).cwiseAbs().maxCoeff() < 1e-6);
    for (std::size_t s = 1; s < gp.objective_trace.size(); ++s)
        CHECK(gp.objective_trace[s] >= gp.objective_trace[s - 1] -
                                           kGpObjectiveSlack * (1.0 + std::abs(gp.objective_trace[s - 1])));
}

TEST_CASE("GP on two antipodal points predicts 0.5 at the midpoint")
{
    TrainSet t;
    t.class_count = 2;
    t.features.resize(2, 2);
    t.features << -1, 0.5,
                   1, -0.5;
    t.labels = {0, 1};
    const auto model = fit_gp_classifier(t);
    for (const auto& g : model.per_class)
        CHECK(g.gradient_norm < 1e-8);
    const Eigen::MatrixXd p = predict_proba(LearnerModel{model}, Eigen::MatrixXd::Zero(1, 2));
    CHECK(std::abs(p(0, 0) - 0.5) <= 1e-6);
    const Eigen::MatrixXd at_train = predict_proba(LearnerModel{model}, t.features);
    CHECK(at_train(0, 0) > 0.5);
    CHECK(at_train(1, 1) > 0.5);
}

TEST_CASE("learner probabilities are normalized for every model")
{
    const auto t = blobs(16, 45, 3, 3);
    auto positive = t;
    positive.features = t.features.array().abs();
    const std::vector<LearnerModel> models{fit_decision_tree(t),  fit_logistic_regression(t),
                                           fit_complement_nb(positive), fit_svm(t),
                                           fit_knn(t),            fit_gp_classifier(t)};
    for (const auto& m : models) {
        CHECK(class_count(m) == 3);
        CHECK(feature_count(m) == 3);
        check_rows_normalized(predict_proba(m, positive.features));
        CHECK_THROWS_AS(predict_proba(m, Eigen::MatrixXd::Zero(2, 5)), ShapeMismatchError);
    }
}
