#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ensemblepool/sampling.hpp"

namespace ensemblepool {

struct SplitCommand {
    std::filesystem::path labels;
    std::optional<std::size_t> class_count;  // inferred from the labels when absent
    SplitRatios ratios;
    std::uint64_t seed = 0;
    bool stratified = true;
    std::optional<int> kfold;
    std::filesystem::path out;
};

struct PoolCommand {
    std::filesystem::path manifest;
    std::string pooler;
    std::optional<std::filesystem::path> fit_split;
    std::filesystem::path out;
    /// Where fitted kinds store their state; defaults to pooler.json next to `out`.
    std::optional<std::filesystem::path> pooler_out;
};

struct EvaluateCommand {
    std::filesystem::path predictions;
    std::filesystem::path labels;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> roc_dir;
    bool table = false;
};

struct ExperimentCommand {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    bool table = false;
};

// Each command throws an Error on failure and writes human output to `out`.
void cmd_split(const SplitCommand& cmd, std::ostream& out);
void cmd_pool(const PoolCommand& cmd, std::ostream& out);
void cmd_evaluate(const EvaluateCommand& cmd, std::ostream& out);
void cmd_experiment(const ExperimentCommand& cmd, std::ostream& out);

}  // namespace ensemblepool
