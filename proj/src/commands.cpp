#include "ensemblepool/commands.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <unordered_map>

#include "ensemblepool/io.hpp"
#include "ensemblepool/metrics.hpp"
#include "ensemblepool/poolers.hpp"
#include "ensemblepool/simulate.hpp"

namespace ensemblepool {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr Partition kSplitPartitions[] = {Partition::ModelTrain, Partition::ModelVal, Partition::EnsembleTrain,
                                          Partition::Testing};

std::string fixed(double v, int digits = 4)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void print_counts(std::ostream& out, const std::string& title, const SplitAssignment& split, const LabelVector& labels,
                  std::span<const Partition> parts)
{
    const std::size_t classes = labels.class_count();
    out << title << "\n";
    out << std::left << std::setw(16) << "partition" << std::right << std::setw(8) << "total";
    for (std::size_t c = 0; c < classes; ++c)
        out << std::setw(8) << ("c" + std::to_string(c));
    out << "\n";
    for (auto p : parts) {
        std::vector<std::size_t> per_class(classes, 0);
        std::size_t total = 0;
        for (std::size_t i = 0; i < split.partitions.size(); ++i)
            if (split.partitions[i] == p) {
                ++per_class[static_cast<std::size_t>(labels.labels()[i])];
                ++total;
            }
        out << std::left << std::setw(16) << to_string(p) << std::right << std::setw(8) << total;
        for (auto n : per_class)
            out << std::setw(8) << n;
        out << "\n";
    }
}

json read_json(const fs::path& path)
{
    try {
        return json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc)
{
    io::write_atomic(path, doc.dump(2) + "\n");
}

void print_metrics_table(std::ostream& out, const MetricReport& report, const std::vector<std::string>& names)
{
    out << std::left << std::setw(14) << "class" << std::right;
    for (const char* h : {"acc", "f1", "sens", "fpr", "spec", "auc"})
        out << std::setw(9) << h;
    out << "\n";
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        out << std::left << std::setw(14) << (c < names.size() ? names[c] : std::to_string(c)) << std::right
            << std::setw(9) << fixed(m.accuracy) << std::setw(9) << fixed(m.f1.value) << std::setw(9)
            << fixed(m.sensitivity.value) << std::setw(9) << fixed(m.fpr.value) << std::setw(9)
            << fixed(m.specificity.value) << std::setw(9) << (m.roc ? fixed(m.roc->auc) : std::string("n/a")) << "\n";
    }
    out << std::left << std::setw(14) << "macro" << std::right << std::setw(9) << fixed(report.macro_accuracy)
        << std::setw(9) << fixed(report.macro_f1) << std::setw(9) << fixed(report.macro_sensitivity) << std::setw(9)
        << fixed(report.macro_fpr) << std::setw(9) << fixed(report.macro_specificity) << std::setw(9)
        << (report.macro_auc ? fixed(*report.macro_auc) : std::string("n/a")) << "\n";
    out << "top-1 error " << fixed(report.top1_error);
    if (report.top3_error)
        out << ", top-3 error " << fixed(*report.top3_error);
    out << "\n";
}

void print_experiment_table(std::ostream& out, const ExperimentReport& report)
{
    out << std::left << std::setw(12) << "technique" << std::setw(20) << "learner" << std::setw(26) << "method"
        << std::right << std::setw(9) << "f1" << std::setw(9) << "acc" << "\n";
    for (const auto& r : report.results)
        out << std::left << std::setw(12) << to_string(r.technique) << std::setw(20)
            << (r.learner.empty() ? "-" : r.learner) << std::setw(26) << r.method << std::right << std::setw(9)
            << fixed(r.metrics.macro_f1) << std::setw(9) << fixed(r.metrics.macro_accuracy) << "\n";
    out << "baseline best: " << report.baseline_best << " f1 " << fixed(report.baseline_best_f1) << "\n";
    for (const auto& d : report.deltas)
        out << to_string(d.technique) << ": " << (d.best_learner.empty() ? "" : d.best_learner + " ") << d.best_method
            << " f1 " << fixed(d.f1) << " (" << (d.f1_gain_percent >= 0 ? "+" : "") << fixed(d.f1_gain_percent, 2)
            << "%)\n";
}

}  // namespace

void cmd_split(const SplitCommand& cmd, std::ostream& out)
{
    const std::size_t classes = cmd.class_count ? *cmd.class_count : io::infer_class_count(cmd.labels);
    const auto labels = io::read_labels_csv(cmd.labels, classes);
    const auto split = percentage_split(labels, cmd.ratios, cmd.seed, cmd.stratified);
    std::vector<SplitAssignment> folds;
    if (cmd.kfold)
        folds = kfold_split(labels, split, KFoldSpec{*cmd.kfold, mix_seed(cmd.seed, 1)});
    write_json(cmd.out, io::split_to_json(split, folds));

    print_counts(out, "split (" + std::to_string(labels.size()) + " samples)", split, labels, kSplitPartitions);
    const Partition fold_parts[] = {Partition::FoldTrain, Partition::FoldVal, Partition::EnsembleTrain,
                                    Partition::Testing};
    for (const auto& f : folds)
        print_counts(out, "fold " + std::to_string(*f.fold_index), f, labels, fold_parts);
}

void cmd_pool(const PoolCommand& cmd, std::ostream& out)
{
    const auto kind = pooler_kind_from_string(cmd.pooler);
    const auto manifest = io::read_manifest(cmd.manifest);
    const auto bundle = io::load_bundle(manifest);

    FittedPooler pooler;
    if (is_static(kind)) {
        pooler.kind = kind;
        pooler.member_count = bundle.member_count();
        pooler.class_count = bundle.class_count();
    } else {
        if (!cmd.fit_split)
            throw ParameterError("pooler '" + cmd.pooler + "' must be fitted: pass --fit-split");
        if (manifest.labels.empty())
            throw ParameterError("pooler '" + cmd.pooler + "' must be fitted: the manifest lists no labels file");
        const auto labels =
            io::align_labels(io::read_labels_csv(manifest.labels, bundle.class_count()), bundle.sample_ids());
        const auto split = io::split_from_json(read_json(*cmd.fit_split));

        std::unordered_map<std::string, std::size_t> position;
        for (std::size_t i = 0; i < bundle.sample_count(); ++i)
            position.emplace(bundle.sample_ids()[i], i);
        std::vector<std::size_t> fit_rows;
        for (std::size_t i = 0; i < split.sample_ids.size(); ++i) {
            if (split.partitions[i] != Partition::EnsembleTrain)
                continue;
            auto it = position.find(split.sample_ids[i]);
            if (it == position.end())
                throw AlignmentError("split sample '" + split.sample_ids[i] + "' is not in the manifest");
            fit_rows.push_back(it->second);
        }
        if (fit_rows.empty())
            throw ParameterError("split has no ensemble-train samples");
        pooler = fit_pooler(kind, bundle.select(fit_rows), labels.select(fit_rows));
        const fs::path state_path = cmd.pooler_out ? *cmd.pooler_out : cmd.out.parent_path() / "pooler.json";
        write_json(state_path, io::pooler_to_json(pooler));
    }

    const auto pooled = pool(pooler, bundle);
    io::write_atomic(cmd.out, io::format_predictions_csv(pooled, manifest.class_names));
    out << "pooled " << bundle.member_count() << " members over " << pooled.sample_count() << " samples with "
        << cmd.pooler << "\n";
}

void cmd_evaluate(const EvaluateCommand& cmd, std::ostream& out)
{
    const auto table = io::read_predictions_csv(cmd.predictions);
    const auto labels =
        io::align_labels(io::read_labels_csv(cmd.labels, table.class_names.size()), table.matrix.sample_ids());
    const auto report = evaluate(table.matrix, labels);
    const auto doc = io::metrics_to_json(report, table.class_names);
    if (cmd.out)
        write_json(*cmd.out, doc);
    if (cmd.roc_dir) {
        for (std::size_t c = 0; c < report.per_class.size(); ++c)
            if (report.per_class[c].roc)
                io::write_atomic(*cmd.roc_dir / ("class_" + std::to_string(c) + "_roc.csv"),
                                 io::format_roc_csv(*report.per_class[c].roc));
    }
    if (cmd.table)
        print_metrics_table(out, report, table.class_names);
    else if (!cmd.out)
        out << doc.dump(2) << "\n";
}

void cmd_experiment(const ExperimentCommand& cmd, std::ostream& out)
{
    auto config = io::config_from_json(read_json(cmd.config));
    if (cmd.seed)
        config.seed = *cmd.seed;
    const auto report = run_experiment(config);
    const auto doc = io::experiment_report_to_json(report, config);
    if (cmd.out)
        write_json(*cmd.out, doc);
    if (cmd.table)
        print_experiment_table(out, report);
    else if (!cmd.out)
        out << doc.dump(2) << "\n";
}

}  // namespace ensemblepool
