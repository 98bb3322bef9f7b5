#include "ensemblepool/metrics.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <numeric>

namespace ensemblepool {

namespace {

void require_aligned(const PredictionMatrix& predictions, const LabelVector& labels)
{
    if (predictions.sample_ids() != labels.sample_ids())
        throw AlignmentError("predictions and labels cover different samples");
    if (predictions.class_count() != labels.class_count())
        throw AlignmentError("predictions have " + std::to_string(predictions.class_count()) +
                             " classes, labels " + std::to_string(labels.class_count()));
    if (labels.size() == 0)
        throw AlignmentError("no samples to evaluate");
}

Rate ratio(std::size_t num, std::size_t den)
{
    if (den == 0)
        return {0.0, true};
    return {static_cast<double>(num) / static_cast<double>(den), false};
}

}  // namespace

std::size_t ConfusionCounts::correct() const
{
    std::size_t sum = 0;
    for (const auto& c : per_class)
        sum += c.tp;
    return sum;
}

ConfusionCounts confusion(const PredictionMatrix& predictions, const LabelVector& labels)
{
    require_aligned(predictions, labels);
    const std::size_t classes = predictions.class_count();
    const std::size_t n = labels.size();
    ConfusionCounts out;
    out.sample_count = n;
    out.per_class.resize(classes);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pred = argmax(predictions.row(i));
        const auto truth = static_cast<std::size_t>(labels[i]);
        for (std::size_t c = 0; c < classes; ++c) {
            auto& k = out.per_class[c];
            const bool p = pred == c;
            const bool t = truth == c;
            if (p && t) ++k.tp;
            else if (p) ++k.fp;
            else if (t) ++k.fn;
            else ++k.tn;
        }
    }
    return out;
}

double accuracy(const ConfusionCounts& counts, std::size_t c)
{
    const auto& k = counts.per_class.at(c);
    return static_cast<double>(k.tp + k.tn) / static_cast<double>(k.total());
}

Rate f1(const ConfusionCounts& counts, std::size_t c)
{
    const auto& k = counts.per_class.at(c);
    return ratio(2 * k.tp, 2 * k.tp + k.fp + k.fn);
}

Rate sensitivity(const ConfusionCounts& counts, std::size_t c)
{
    const auto& k = counts.per_class.at(c);
    return ratio(k.tp, k.tp + k.fn);
}

Rate fpr(const ConfusionCounts& counts, std::size_t c)
{
    const auto& k = counts.per_class.at(c);
    return ratio(k.fp, k.fp + k.tn);
}

Rate specificity(const ConfusionCounts& counts, std::size_t c)
{
    const Rate r = fpr(counts, c);
    if (r.degenerate)
        return {0.0, true};
    return {1.0 - r.value, false};
}

double top_k_error(const PredictionMatrix& predictions, const LabelVector& labels, std::size_t k)
{
    require_aligned(predictions, labels);
    if (k < 1 || k > predictions.class_count())
        throw ParameterError("top-k error needs 1 <= k <= C");
    std::size_t misses = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto row = predictions.row(i);
        const auto t = static_cast<std::size_t>(labels[i]);
        std::size_t rank = 0;
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j] > row[t] || (row[j] == row[t] && j < t))
                ++rank;
        if (rank >= k)
            ++misses;
    }
    return static_cast<double>(misses) / static_cast<double>(labels.size());
}

double macro(std::span<const double> values)
{
    if (values.empty())
        throw ParameterError("macro average of an empty list");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double macro_f1(const PredictionMatrix& predictions, const LabelVector& labels)
{
    const auto counts = confusion(predictions, labels);
    std::vector<double> v(counts.class_count());
    for (std::size_t c = 0; c < v.size(); ++c)
        v[c] = f1(counts, c).value;
    return macro(v);
}

RocCurve roc_auc(std::span<const double> scores, std::span<const bool> positive)
{
    if (scores.size() != positive.size())
        throw ShapeMismatchError("roc_auc: scores and labels differ in length");
    const auto pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
    const std::size_t neg = positive.size() - pos;
    if (pos == 0 || neg == 0)
        throw OneClassError("ROC analysis needs at least one positive and one negative sample");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    double area2 = 0.0;  // twice the area, in units of tp*fp counts
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        const std::size_t tp_before = tp;
        const std::size_t fp_before = fp;
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            if (positive[order[i]]) ++tp;
            else ++fp;
        }
        area2 += static_cast<double>(fp - fp_before) * static_cast<double>(tp + tp_before);
        curve.points.push_back(
            {s, static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    }
    curve.auc = area2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return curve;
}

MetricReport evaluate(const PredictionMatrix& predictions, const LabelVector& labels)
{
    const auto counts = confusion(predictions, labels);
    const std::size_t classes = counts.class_count();
    const std::size_t n = labels.size();

    MetricReport report;
    report.sample_count = n;
    report.per_class.resize(classes);
    std::vector<double> acc(classes), f(classes), sens(classes), fp(classes), spec(classes), aucs;
    std::vector<double> scores(n);
    auto flags = std::make_unique<bool[]>(n);
    for (std::size_t c = 0; c < classes; ++c) {
        auto& m = report.per_class[c];
        m.counts = counts.per_class[c];
        m.accuracy = acc[c] = accuracy(counts, c);
        m.f1 = f1(counts, c);
        m.sensitivity = sensitivity(counts, c);
        m.fpr = fpr(counts, c);
        m.specificity = specificity(counts, c);
        f[c] = m.f1.value;
        sens[c] = m.sensitivity.value;
        fp[c] = m.fpr.value;
        spec[c] = m.specificity.value;

        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = predictions(i, c);
            flags[i] = static_cast<std::size_t>(labels[i]) == c;
        }
        try {
            m.roc = roc_auc(scores, std::span<const bool>(flags.get(), n));
            aucs.push_back(m.roc->auc);
        } catch (const OneClassError&) {
            m.roc.reset();
        }
    }
    report.macro_accuracy = macro(acc);
    report.macro_f1 = macro(f);
    report.macro_sensitivity = macro(sens);
    report.macro_fpr = macro(fp);
    report.macro_specificity = macro(spec);
    if (!aucs.empty())
        report.macro_auc = macro(aucs);
    report.top1_error = top_k_error(predictions, labels, 1);
    if (classes >= 3)
        report.top3_error = top_k_error(predictions, labels, 3);
    return report;
}

}  // namespace ensemblepool
