#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ensemblepool/core.hpp"
#include "ensemblepool/learners.hpp"

namespace ensemblepool {

enum class PoolerKind {
    BestModel,
    DecisionTree,
    GaussianProcess,
    GlobalArgmax,
    LogisticRegression,
    MajorityVoteHard,
    MajorityVoteSoft,
    MeanUnweighted,
    MeanWeighted,
    NaiveBayesComplement,
    SupportVectorMachine,
    KNearestNeighbors,
};

inline constexpr std::array<PoolerKind, 12> kAllPoolerKinds = {
    PoolerKind::BestModel,          PoolerKind::DecisionTree,         PoolerKind::GaussianProcess,
    PoolerKind::GlobalArgmax,       PoolerKind::LogisticRegression,   PoolerKind::MajorityVoteHard,
    PoolerKind::MajorityVoteSoft,   PoolerKind::MeanUnweighted,       PoolerKind::MeanWeighted,
    PoolerKind::NaiveBayesComplement, PoolerKind::SupportVectorMachine, PoolerKind::KNearestNeighbors,
};

/// Kebab-case name used on the command line and in JSON, e.g. "mean-unweighted".
std::string to_string(PoolerKind kind);
PoolerKind pooler_kind_from_string(const std::string& name);

/// Static poolers need no ensemble-train data.
bool is_static(PoolerKind kind);
/// Poolers backed by a classifier from the learners module.
bool is_trainable(PoolerKind kind);

struct MemberWeights {
    std::vector<double> weights;
};

struct BestMember {
    std::size_t index = 0;
};

struct FittedPooler {
    PoolerKind kind = PoolerKind::MeanUnweighted;
    std::size_t member_count = 0;
    std::size_t class_count = 0;
    std::variant<std::monostate, MemberWeights, BestMember, LearnerModel> state;
};

/// Fits `kind` on ensemble-train predictions and labels. Member scores for
/// BestModel and MeanWeighted are macro-F1; MeanWeighted falls back to
/// uniform weights when every member scores 0.
FittedPooler fit_pooler(PoolerKind kind, const EnsembleBundle& bundle, const LabelVector& labels);

/// Applies a fitted pooler. Static kinds accept any member count.
PredictionMatrix pool(const FittedPooler& pooler, const EnsembleBundle& bundle);

PredictionMatrix pool_mean_unweighted(const EnsembleBundle& bundle);
PredictionMatrix pool_mean_weighted(const EnsembleBundle& bundle, std::span<const double> weights);
PredictionMatrix pool_majority_vote_hard(const EnsembleBundle& bundle);
PredictionMatrix pool_majority_vote_soft(const EnsembleBundle& bundle);
/// Keeps the single largest probability over all members and classes and
/// zeroes the rest. Output is flagged degenerate.
PredictionMatrix pool_global_argmax(const EnsembleBundle& bundle);
PredictionMatrix pool_trained(const FittedPooler& pooler, const EnsembleBundle& bundle);

/// N x (M*C) features, member-major: member 0 classes 0..C-1, then member 1, ...
Eigen::MatrixXd stacking_features(const EnsembleBundle& bundle);

}  // namespace ensemblepool
