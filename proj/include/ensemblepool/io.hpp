#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensemblepool/core.hpp"
#include "ensemblepool/metrics.hpp"
#include "ensemblepool/poolers.hpp"
#include "ensemblepool/simulate.hpp"

namespace ensemblepool::io {

inline constexpr int kSchemaVersion = 1;

using nlohmann::json;

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// Prediction CSV: header `sample_id,<class_0>,...`, 10 significant digits.
struct PredictionTable {
    std::vector<std::string> class_names;
    PredictionMatrix matrix;
};

PredictionTable parse_predictions_csv(const std::string& text, const std::string& source = "<predictions>");
std::string format_predictions_csv(const PredictionMatrix& matrix, const std::vector<std::string>& class_names);
PredictionTable read_predictions_csv(const std::filesystem::path& path);

// Labels CSV: header `sample_id,label`, integer class indices.
LabelVector parse_labels_csv(const std::string& text, std::size_t class_count, const std::string& source = "<labels>");
LabelVector read_labels_csv(const std::filesystem::path& path, std::size_t class_count);
/// Largest label + 1 found in a labels file; used when no class list is known.
std::size_t infer_class_count(const std::filesystem::path& path);

/// Reorders `labels` to follow `sample_ids`. Throws AlignmentError when the
/// id sets differ.
LabelVector align_labels(const LabelVector& labels, const std::vector<std::string>& sample_ids);

std::string format_roc_csv(const RocCurve& curve);

// Split documents.
json split_to_json(const SplitAssignment& split, const std::vector<SplitAssignment>& folds);
SplitAssignment split_from_json(const json& doc);
std::vector<SplitAssignment> folds_from_json(const json& doc);

// Fitted poolers (versioned).
json pooler_to_json(const FittedPooler& pooler);
FittedPooler pooler_from_json(const json& doc);

json metrics_to_json(const MetricReport& report, const std::vector<std::string>& class_names);
json experiment_report_to_json(const ExperimentReport& report, const ExperimentConfig& config);

/// Parses a scenario configuration; errors name the offending field path.
ExperimentConfig config_from_json(const json& doc);

/// Member list of an ingested ensemble.
struct BundleManifest {
    int schema_version = kSchemaVersion;
    std::vector<std::string> class_names;
    std::filesystem::path labels;
    struct Member {
        std::string name;
        SourceKind source_kind = SourceKind::Architecture;
        std::filesystem::path path;
    };
    std::vector<Member> members;
};

/// Relative paths resolve against the manifest's directory.
BundleManifest read_manifest(const std::filesystem::path& path);

/// Loads, aligns and validates every member; rows within the ingestion
/// tolerance are renormalized.
EnsembleBundle load_bundle(const BundleManifest& manifest);

}  // namespace ensemblepool::io
