#include "ensemblepool/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace ensemblepool {

namespace {

constexpr double kMinProbability = 1e-12;

// Salts separating the seed streams derived from ExperimentConfig::seed.
enum SeedSalt : std::uint64_t { kDatasetSalt = 1, kSplitSalt, kLearnerSalt, kFoldSalt, kAugmentSalt };

std::vector<std::size_t> proportional_counts(std::size_t n, std::span<const double> proportions)
{
    std::vector<std::size_t> counts(proportions.size());
    std::vector<double> remainder(proportions.size());
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < proportions.size(); ++c) {
        const double exact = proportions[c] * static_cast<double>(n);
        const double floored = std::floor(exact + 1e-9);
        counts[c] = static_cast<std::size_t>(floored);
        remainder[c] = exact - floored;
        assigned += counts[c];
    }
    std::vector<std::size_t> order(proportions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b] + 1e-9; });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % order.size(), ++assigned)
        ++counts[order[k]];
    return counts;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sigma, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, sigma);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = normal(rng);
    return m;
}

std::vector<std::string> make_ids(std::size_t n)
{
    const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string digits = std::to_string(i);
        ids[i] = "s" + std::string(width - digits.size(), '0') + digits;
    }
    return ids;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> rows,
                            std::span<const Eigen::Index> cols)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                x(static_cast<Eigen::Index>(rows[r]), cols[c]);
    return out;
}

// Per-sample focal loss terms for a batch: fills `loss` (weighted) and,
// when `grad` is non-null, the gradient with respect to the logits.
void focal_batch(const Eigen::MatrixXd& logits, std::span<const int> targets, const FocalLossParams& params,
                 Eigen::VectorXd& loss, Eigen::MatrixXd* grad)
{
    const Eigen::Index n = logits.rows();
    const Eigen::Index c = logits.cols();
    loss.resize(n);
    if (grad)
        grad->resize(n, c);
    Eigen::RowVectorXd p(c);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto t = static_cast<Eigen::Index>(targets[static_cast<std::size_t>(i)]);
        const double top = logits.row(i).maxCoeff();
        p = (logits.row(i).array() - top).exp();
        const double sum = p.sum();
        p /= sum;
        const double log_pt = std::max(logits(i, t) - top - std::log(sum), std::log(kMinProbability));
        const double pt = p(t);
        double one_minus = 0.0;  // summed directly to avoid cancellation in 1 - p_t
        for (Eigen::Index j = 0; j < c; ++j)
            if (j != t)
                one_minus += p(j);
        const double alpha = params.alpha.weights[static_cast<std::size_t>(t)];
        const double modulator = params.gamma == 0.0 ? 1.0 : std::pow(one_minus, params.gamma);
        loss(i) = -alpha * modulator * log_pt;
        if (!grad)
            continue;
        if (one_minus == 0.0) {
            grad->row(i).setZero();
            continue;
        }
        const double focus =
            params.gamma == 0.0 ? 0.0 : params.gamma * std::pow(one_minus, params.gamma - 1.0) * pt * log_pt;
        const double g = alpha * (focus - modulator);
        grad->row(i) = -g * p;
        (*grad)(i, t) += g;
    }
}

}  // namespace

void SyntheticSpec::validate() const
{
    if (n_classes < 2)
        throw ParameterError("synthetic dataset needs at least 2 classes");
    if (n_features < 1)
        throw ParameterError("synthetic dataset needs at least 1 feature");
    if (n_samples < 4 * n_classes)
        throw ParameterError("synthetic dataset needs n_samples >= 4 * n_classes");
    if (!(class_separation > 0.0))
        throw ParameterError("class_separation must be positive");
    if (!(label_noise >= 0.0 && label_noise < 0.5))
        throw ParameterError("label_noise must lie in [0, 0.5)");
    if (!imbalance.empty()) {
        if (imbalance.size() != n_classes)
            throw ParameterError("imbalance needs one proportion per class");
        double sum = 0.0;
        for (double v : imbalance) {
            if (!(v > 0.0))
                throw ParameterError("imbalance proportions must be positive");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ParameterError("imbalance proportions must sum to 1");
    }
}

Dataset generate_dataset(const SyntheticSpec& spec)
{
    spec.validate();
    const auto classes = static_cast<Eigen::Index>(spec.n_classes);
    const auto dims = static_cast<Eigen::Index>(spec.n_features);
    std::mt19937_64 rng(spec.seed);

    // Orthonormal directions put every pair of centers exactly
    // class_separation apart; with more classes than dimensions, random
    // unit directions only approximate that.
    Eigen::MatrixXd directions = gaussian_matrix(dims, classes, 1.0, rng);
    if (classes <= dims) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(directions);
        directions = qr.householderQ() * Eigen::MatrixXd::Identity(dims, classes);
    } else {
        directions.colwise().normalize();
    }
    const Eigen::MatrixXd centers = directions * (spec.class_separation / std::sqrt(2.0));

    std::vector<double> proportions = spec.imbalance;
    if (proportions.empty())
        proportions.assign(spec.n_classes, 1.0 / static_cast<double>(spec.n_classes));
    const auto counts = proportional_counts(spec.n_samples, proportions);

    const auto n = static_cast<Eigen::Index>(spec.n_samples);
    std::vector<int> labels;
    labels.reserve(spec.n_samples);
    for (std::size_t c = 0; c < counts.size(); ++c)
        labels.insert(labels.end(), counts[c], static_cast<int>(c));
    std::shuffle(labels.begin(), labels.end(), rng);

    Eigen::MatrixXd features = gaussian_matrix(n, dims, 1.0, rng);
    for (Eigen::Index i = 0; i < n; ++i)
        features.row(i) += centers.col(labels[static_cast<std::size_t>(i)]).transpose();

    const auto noisy = static_cast<std::size_t>(std::llround(spec.label_noise * static_cast<double>(spec.n_samples)));
    if (noisy > 0) {
        std::vector<std::size_t> order(spec.n_samples);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::uniform_int_distribution<int> draw(0, static_cast<int>(spec.n_classes) - 1);
        for (std::size_t k = 0; k < noisy; ++k)
            labels[order[k]] = draw(rng);
    }
    return {std::move(features), LabelVector(make_ids(spec.n_samples), std::move(labels), spec.n_classes)};
}

double focal_loss(std::span<const double> probs, int true_class, const FocalLossParams& params)
{
    if (true_class < 0 || static_cast<std::size_t>(true_class) >= probs.size())
        throw ParameterError("focal loss: class index out of range");
    if (params.gamma < 0.0)
        throw ParameterError("focal loss: gamma must be non-negative");
    const double alpha = params.alpha.weights.empty() ? 1.0 : params.alpha.weights.at(static_cast<std::size_t>(true_class));
    const double pt = std::max(probs[static_cast<std::size_t>(true_class)], kMinProbability);
    if (pt >= 1.0)
        return 0.0;
    return -alpha * std::pow(1.0 - pt, params.gamma) * std::log(pt);
}

std::vector<double> focal_loss_gradient(std::span<const double> logits, int true_class, const FocalLossParams& params)
{
    if (true_class < 0 || static_cast<std::size_t>(true_class) >= logits.size())
        throw ParameterError("focal loss: class index out of range");
    FocalLossParams p = params;
    if (p.alpha.weights.empty())
        p.alpha = ClassWeights::uniform(logits.size());
    const Eigen::Map<const Eigen::RowVectorXd> row(logits.data(), static_cast<Eigen::Index>(logits.size()));
    Eigen::VectorXd loss;
    Eigen::MatrixXd grad;
    const int target[] = {true_class};
    focal_batch(row, target, p, loss, &grad);
    return {grad.data(), grad.data() + grad.size()};
}

void BaseLearnerSpec::validate() const
{
    if (!(feature_subset_fraction > 0.0 && feature_subset_fraction <= 1.0))
        throw ParameterError("feature_subset_fraction must lie in (0, 1]");
    if (!(learning_rate > 0.0))
        throw ParameterError("learning_rate must be positive");
    if (max_epochs < 1)
        throw ParameterError("max_epochs must be >= 1");
    if (patience < 1)
        throw ParameterError("patience must be >= 1");
}

Eigen::MatrixXd BaseModel::predict(const Eigen::MatrixXd& features) const
{
    Eigen::MatrixXd logits(features.rows(), weights.rows());
    Eigen::MatrixXd x(features.rows(), static_cast<Eigen::Index>(feature_indices.size()));
    for (std::size_t c = 0; c < feature_indices.size(); ++c)
        x.col(static_cast<Eigen::Index>(c)) = features.col(feature_indices[c]);
    logits = x * weights.transpose();
    logits.rowwise() += bias.transpose();
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double top = logits.row(i).maxCoeff();
        logits.row(i) = (logits.row(i).array() - top).exp();
        logits.row(i) /= logits.row(i).sum();
    }
    return logits;
}

BaseModel train_base_learner(const Eigen::MatrixXd& features, const LabelVector& labels, const SplitAssignment& split,
                             const BaseLearnerSpec& spec, FocalLossParams loss)
{
    spec.validate();
    if (static_cast<std::size_t>(features.rows()) != labels.size() || split.sample_ids != labels.sample_ids())
        throw LabelMismatchError("features, labels and split must cover the same samples");
    const auto train_idx = split.indices(split.training_partition());
    const auto val_idx = split.indices(split.validation_partition());
    if (train_idx.empty() || val_idx.empty())
        throw DegenerateSplitError("split needs non-empty training and validation partitions");
    if (loss.alpha.weights.empty())
        loss.alpha = compute_class_weights(labels, split);
    loss.alpha.validate();
    if (loss.alpha.weights.size() != labels.class_count())
        throw ShapeMismatchError("class weights do not match the class count");

    const auto dims = static_cast<std::size_t>(features.cols());
    const auto classes = static_cast<Eigen::Index>(labels.class_count());
    BaseModel model;
    model.name = spec.member_name;

    std::mt19937_64 subset_rng(mix_seed(spec.init_seed, 0));
    std::vector<Eigen::Index> all(dims);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), subset_rng);
    const auto keep = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(spec.feature_subset_fraction * static_cast<double>(dims))), 1, dims);
    model.feature_indices.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(model.feature_indices.begin(), model.feature_indices.end());

    const Eigen::MatrixXd x_train = gather_rows(features, train_idx, model.feature_indices);
    const Eigen::MatrixXd x_val = gather_rows(features, val_idx, model.feature_indices);
    std::vector<int> y_train, y_val;
    for (std::size_t i : train_idx)
        y_train.push_back(labels[i]);
    for (std::size_t i : val_idx)
        y_val.push_back(labels[i]);

    std::mt19937_64 init_rng(mix_seed(spec.init_seed, 1));
    Eigen::MatrixXd w = gaussian_matrix(classes, static_cast<Eigen::Index>(keep), 0.01, init_rng);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(classes);

    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    const double inv_n = 1.0 / static_cast<double>(train_idx.size());
    Eigen::VectorXd losses;
    Eigen::MatrixXd grad;
    for (int epoch = 1; epoch <= spec.max_epochs; ++epoch) {
        Eigen::MatrixXd logits = x_train * w.transpose();
        logits.rowwise() += b.transpose();
        focal_batch(logits, y_train, loss, losses, &grad);
        w -= spec.learning_rate * inv_n * (grad.transpose() * x_train);
        b -= spec.learning_rate * inv_n * grad.colwise().sum().transpose();

        Eigen::MatrixXd val_logits = x_val * w.transpose();
        val_logits.rowwise() += b.transpose();
        focal_batch(val_logits, y_val, loss, losses, nullptr);
        const double val_loss = losses.mean();
        model.validation_losses.push_back(val_loss);
        model.epochs_run = epoch;
        if (val_loss < best) {
            best = val_loss;
            model.best_epoch = epoch;
            model.weights = w;
            model.bias = b;
            since_best = 0;
        } else if (++since_best >= spec.patience) {
            break;
        }
    }
    if (model.best_epoch == 0) {
        // Every epoch produced a non-finite loss; keep the last iterate.
        model.weights = w;
        model.bias = b;
    }
    return model;
}

PredictionMatrix predict_matrix(const BaseModel& model, const Eigen::MatrixXd& features,
                                std::vector<std::string> sample_ids)
{
    const Eigen::MatrixXd probs = model.predict(features);
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor rm = probs;
    return {std::move(sample_ids), static_cast<std::size_t>(probs.cols()),
            std::vector<double>(rm.data(), rm.data() + rm.size())};
}

EnsembleBundle predict_augmented(const BaseModel& model, const Eigen::MatrixXd& features,
                                 const std::vector<std::string>& sample_ids, const AugmentSpec& aug)
{
    if (aug.copies < 1)
        throw ParameterError("augmentation needs at least one copy");
    if (!(aug.jitter_sigma >= 0.0))
        throw ParameterError("jitter_sigma must be non-negative");
    EnsembleBundle bundle;
    std::mt19937_64 rng(aug.seed);
    for (int t = 0; t < aug.copies; ++t) {
        Eigen::MatrixXd jittered = features;
        if (t > 0 && aug.jitter_sigma > 0.0)
            jittered += gaussian_matrix(features.rows(), features.cols(), aug.jitter_sigma, rng);
        bundle.members.push_back({model.name + "/aug" + std::to_string(t), SourceKind::AugmentedCopy,
                                  predict_matrix(model, jittered, sample_ids)});
    }
    return bundle;
}

std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::Baseline: return "baseline";
    case Scenario::Augmenting: return "augmenting";
    case Scenario::Stacking: return "stacking";
    case Scenario::Bagging: return "bagging";
    }
    return "baseline";
}

Scenario scenario_from_string(const std::string& name)
{
    for (auto s : {Scenario::Baseline, Scenario::Augmenting, Scenario::Stacking, Scenario::Bagging})
        if (to_string(s) == name)
            return s;
    throw ConfigError("unknown scenario '" + name + "'");
}

void ExperimentConfig::validate() const
{
    auto wrap = [](const std::string& field, auto&& check) {
        try {
            check();
        } catch (const ParameterError& e) {
            throw ConfigError(field + ": " + e.what());
        }
    };
    wrap("dataset", [&] { dataset.validate(); });
    wrap("ratios", [&] { ratios.validate(); });
    if (learners.empty())
        throw ConfigError("learners: at least one base learner is required");
    std::set<std::string> names;
    for (std::size_t i = 0; i < learners.size(); ++i) {
        wrap("learners[" + std::to_string(i) + "]", [&] { learners[i].validate(); });
        if (!names.insert(learners[i].member_name).second)
            throw ConfigError("learners[" + std::to_string(i) + "].name: duplicate name '" + learners[i].member_name +
                              "'");
    }
    if (focal_gamma < 0.0)
        throw ConfigError("focal_gamma: must be non-negative");
    if (scenarios.empty())
        throw ConfigError("scenarios: at least one scenario is required");
    std::set<Scenario> seen;
    bool needs_poolers = false;
    for (auto s : scenarios) {
        if (!seen.insert(s).second)
            throw ConfigError("scenarios: '" + to_string(s) + "' listed twice");
        needs_poolers = needs_poolers || s == Scenario::Stacking || s == Scenario::Bagging;
    }
    if (seen.count(Scenario::Stacking) && learners.size() < 2)
        throw ConfigError("learners: Stacking needs at least 2 base learners");
    if (seen.count(Scenario::Bagging) && kfold.k < 2)
        throw ConfigError("kfold.k: Bagging needs k >= 2");
    if (seen.count(Scenario::Augmenting)) {
        if (augment.copies < 1)
            throw ConfigError("augment.copies: must be >= 1");
        if (!(augment.jitter_sigma >= 0.0))
            throw ConfigError("augment.jitter_sigma: must be non-negative");
    }
    if (needs_poolers && poolers.empty())
        throw ConfigError("poolers: Stacking and Bagging need at least one pooler");
}

namespace {

struct ExperimentData {
    Dataset data;
    SplitAssignment split;
    std::vector<std::size_t> ensemble_idx;
    std::vector<std::size_t> test_idx;
    LabelVector ensemble_labels;
    LabelVector test_labels;
    Eigen::MatrixXd ensemble_x;
    Eigen::MatrixXd test_x;
};

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, std::span<const std::size_t> rows)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

// Fits every requested pooler on the ensemble-train bundle and evaluates it on testing.
void evaluate_poolers(const ExperimentConfig& config, Scenario technique, const std::string& learner,
                      const EnsembleBundle& fit_bundle, const EnsembleBundle& test_bundle, const ExperimentData& d,
                      std::vector<MethodResult>& out)
{
    std::vector<MethodResult> results(config.poolers.size());
    parallel_for(config.poolers.size(), [&](std::size_t p) {
        const auto kind = config.poolers[p];
        const auto pooler = fit_pooler(kind, fit_bundle, d.ensemble_labels);
        results[p] = {technique, learner, to_string(kind), evaluate(pool(pooler, test_bundle), d.test_labels)};
    });
    out.insert(out.end(), std::make_move_iterator(results.begin()), std::make_move_iterator(results.end()));
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const std::set<Scenario> wanted(config.scenarios.begin(), config.scenarios.end());

    ExperimentData d;
    SyntheticSpec dataset = config.dataset;
    dataset.seed = mix_seed(mix_seed(config.seed, kDatasetSalt), config.dataset.seed);
    d.data = generate_dataset(dataset);
    d.split = percentage_split(d.data.labels, config.ratios, mix_seed(config.seed, kSplitSalt), config.stratified);
    d.ensemble_idx = d.split.indices(Partition::EnsembleTrain);
    d.test_idx = d.split.indices(Partition::Testing);
    d.ensemble_labels = d.data.labels.select(d.ensemble_idx);
    d.test_labels = d.data.labels.select(d.test_idx);
    d.ensemble_x = rows_of(d.data.features, d.ensemble_idx);
    d.test_x = rows_of(d.data.features, d.test_idx);

    FocalLossParams loss;
    loss.gamma = config.focal_gamma;

    auto learner_spec = [&](std::size_t m) {
        BaseLearnerSpec spec = config.learners[m];
        spec.init_seed = mix_seed(mix_seed(config.seed, kLearnerSalt), spec.init_seed);
        return spec;
    };

    const std::size_t members = config.learners.size();
    std::vector<BaseModel> baseline(members);
    parallel_for(members, [&](std::size_t m) {
        baseline[m] = train_base_learner(d.data.features, d.data.labels, d.split, learner_spec(m), loss);
    });

    ExperimentReport report;
    std::vector<MetricReport> baseline_metrics(members);
    for (std::size_t m = 0; m < members; ++m)
        baseline_metrics[m] = evaluate(predict_matrix(baseline[m], d.test_x, d.test_labels.sample_ids()), d.test_labels);
    std::size_t best = 0;
    for (std::size_t m = 1; m < members; ++m)
        if (baseline_metrics[m].macro_f1 > baseline_metrics[best].macro_f1)
            best = m;
    report.baseline_best = config.learners[best].member_name;
    report.baseline_best_f1 = baseline_metrics[best].macro_f1;
    report.baseline_best_accuracy = baseline_metrics[best].macro_accuracy;

    if (wanted.count(Scenario::Baseline))
        for (std::size_t m = 0; m < members; ++m)
            report.results.push_back({Scenario::Baseline, config.learners[m].member_name, "single", baseline_metrics[m]});

    if (wanted.count(Scenario::Augmenting)) {
        std::vector<MethodResult> aug(members);
        parallel_for(members, [&](std::size_t m) {
            AugmentSpec spec = config.augment;
            spec.seed = mix_seed(mix_seed(config.seed, kAugmentSalt), mix_seed(config.augment.seed, m));
            const auto bundle = predict_augmented(baseline[m], d.test_x, d.test_labels.sample_ids(), spec);
            aug[m] = {Scenario::Augmenting, config.learners[m].member_name, to_string(PoolerKind::MeanUnweighted),
                      evaluate(pool_mean_unweighted(bundle), d.test_labels)};
        });
        report.results.insert(report.results.end(), aug.begin(), aug.end());
    }

    if (wanted.count(Scenario::Stacking)) {
        EnsembleBundle fit_bundle, test_bundle;
        for (std::size_t m = 0; m < members; ++m) {
            const auto& name = config.learners[m].member_name;
            fit_bundle.members.push_back(
                {name, SourceKind::Architecture, predict_matrix(baseline[m], d.ensemble_x, d.ensemble_labels.sample_ids())});
            test_bundle.members.push_back(
                {name, SourceKind::Architecture, predict_matrix(baseline[m], d.test_x, d.test_labels.sample_ids())});
        }
        evaluate_poolers(config, Scenario::Stacking, "", fit_bundle, test_bundle, d, report.results);
    }

    if (wanted.count(Scenario::Bagging)) {
        KFoldSpec kfold = config.kfold;
        kfold.seed = mix_seed(mix_seed(config.seed, kFoldSalt), config.kfold.seed);
        const auto folds = kfold_split(d.data.labels, d.split, kfold);
        const std::size_t k = folds.size();
        std::vector<BaseModel> fold_models(members * k);
        parallel_for(members * k, [&](std::size_t job) {
            const std::size_t m = job / k;
            BaseLearnerSpec spec = learner_spec(m);
            spec.member_name = config.learners[m].member_name + "/fold" + std::to_string(job % k);
            fold_models[job] = train_base_learner(d.data.features, d.data.labels, folds[job % k], spec, loss);
        });
        for (std::size_t m = 0; m < members; ++m) {
            EnsembleBundle fit_bundle, test_bundle;
            for (std::size_t f = 0; f < k; ++f) {
                const auto& model = fold_models[m * k + f];
                fit_bundle.members.push_back(
                    {model.name, SourceKind::Fold, predict_matrix(model, d.ensemble_x, d.ensemble_labels.sample_ids())});
                test_bundle.members.push_back(
                    {model.name, SourceKind::Fold, predict_matrix(model, d.test_x, d.test_labels.sample_ids())});
            }
            evaluate_poolers(config, Scenario::Bagging, config.learners[m].member_name, fit_bundle, test_bundle, d,
                             report.results);
        }
    }

    for (auto technique : config.scenarios) {
        if (technique == Scenario::Baseline)
            continue;
        const MethodResult* top = nullptr;
        for (const auto& r : report.results)
            if (r.technique == technique && (!top || r.metrics.macro_f1 > top->metrics.macro_f1))
                top = &r;
        if (!top)
            continue;
        TechniqueDelta delta;
        delta.technique = technique;
        delta.best_learner = top->learner;
        delta.best_method = top->method;
        delta.f1 = top->metrics.macro_f1;
        delta.accuracy = top->metrics.macro_accuracy;
        delta.f1_gain_percent =
            report.baseline_best_f1 > 0.0 ? 100.0 * (delta.f1 - report.baseline_best_f1) / report.baseline_best_f1 : 0.0;
        delta.accuracy_gain_percent = report.baseline_best_accuracy > 0.0
                                          ? 100.0 * (delta.accuracy - report.baseline_best_accuracy) /
                                                report.baseline_best_accuracy
                                          : 0.0;
        report.deltas.push_back(delta);
    }
    return report;
}

}  // namespace ensemblepool
