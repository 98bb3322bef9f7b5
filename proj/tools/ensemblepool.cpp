#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ensemblepool/commands.hpp"
#include "ensemblepool/core.hpp"

namespace {

ensemblepool::SplitRatios parse_ratios(const std::string& text)
{
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        parts.push_back(std::stod(item));
    if (parts.size() != 4)
        throw ensemblepool::ParameterError("--ratios takes four comma-separated fractions");
    return {parts[0], parts[1], parts[2], parts[3]};
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace ensemblepool;

    CLI::App app{"Pool ensemble class-probability predictions and evaluate them"};
    app.require_subcommand(1);

    SplitCommand split;
    std::string ratios = "0.65,0.10,0.10,0.15";
    int kfold = 0;
    std::size_t classes = 0;
    auto* split_cmd = app.add_subcommand("split", "Assign samples to partitions");
    split_cmd->add_option("labels", split.labels, "labels CSV (sample_id,label)")->required();
    split_cmd->add_option("--ratios", ratios, "model-train,model-val,ensemble-train,testing fractions");
    split_cmd->add_option("--seed", split.seed, "random seed");
    split_cmd->add_flag("--stratified,!--no-stratified", split.stratified, "stratify by class (default on)");
    split_cmd->add_option("--kfold", kfold, "also emit k cross-validation folds");
    split_cmd->add_option("--classes", classes, "class count (default: largest label + 1)");
    split_cmd->add_option("--out", split.out, "split JSON output")->required();

    PoolCommand pool;
    auto* pool_cmd = app.add_subcommand("pool", "Combine the members of a manifest");
    pool_cmd->add_option("manifest", pool.manifest, "bundle manifest JSON")->required();
    pool_cmd->add_option("--pooler", pool.pooler, "pooling function")->required();
    pool_cmd->add_option("--fit-split", pool.fit_split, "split JSON whose ensemble-train rows fit the pooler");
    pool_cmd->add_option("--out", pool.out, "pooled predictions CSV")->required();
    pool_cmd->add_option("--pooler-out", pool.pooler_out, "fitted pooler JSON (default: pooler.json beside --out)");

    EvaluateCommand evaluate;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against labels");
    eval_cmd->add_option("predictions", evaluate.predictions, "predictions CSV")->required();
    eval_cmd->add_option("labels", evaluate.labels, "labels CSV")->required();
    eval_cmd->add_option("--out", evaluate.out, "report JSON");
    eval_cmd->add_option("--roc-dir", evaluate.roc_dir, "directory for class_<i>_roc.csv files");
    eval_cmd->add_flag("--table", evaluate.table, "print an aligned text table");

    ExperimentCommand experiment;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a synthetic ensemble experiment");
    exp_cmd->add_option("config", experiment.config, "scenario config JSON")->required();
    exp_cmd->add_option("--out", experiment.out, "report JSON");
    exp_cmd->add_option("--seed", experiment.seed, "override the config seed");
    exp_cmd->add_flag("--table", experiment.table, "print an aligned text table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*split_cmd) {
            split.ratios = parse_ratios(ratios);
            if (kfold > 0)
                split.kfold = kfold;
            if (classes > 0)
                split.class_count = classes;
            cmd_split(split, std::cout);
        } else if (*pool_cmd) {
            cmd_pool(pool, std::cout);
        } else if (*eval_cmd) {
            cmd_evaluate(evaluate, std::cout);
        } else if (*exp_cmd) {
            cmd_experiment(experiment, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
