#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ensemblepool/commands.hpp"
#include "ensemblepool/io.hpp"

using namespace ensemblepool;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("ensemblepool_cmd_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& name) const { return path / name; }
};

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(ENSEMBLEPOOL_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void balanced_labels(const fs::path& p, std::size_t n, std::size_t classes)
{
    std::ofstream out(p);
    out << "sample_id,label\n";
    for (std::size_t i = 0; i < n; ++i)
        out << "x" << i << "," << i % classes << "\n";
}

// Two members over four samples, three classes.
void two_member_manifest(const TempDir& dir)
{
    write(dir / "a.csv", "sample_id,c0,c1,c2\nq0,0.7,0.2,0.1\nq1,0.1,0.8,0.1\nq2,0.3,0.3,0.4\nq3,0.5,0.25,0.25\n");
    write(dir / "b.csv", "sample_id,c0,c1,c2\nq0,0.5,0.4,0.1\nq1,0.2,0.2,0.6\nq2,0.1,0.1,0.8\nq3,0.2,0.6,0.2\n");
    write(dir / "labels.csv", "sample_id,label\nq0,0\nq1,1\nq2,2\nq3,0\n");
    write(dir / "m.json", R"({"schema_version": 1, "class_names": ["c0", "c1", "c2"], "labels": "labels.csv",
        "members": [{"name": "a", "path": "a.csv"}, {"name": "b", "path": "b.csv"}]})");
    write(dir / "split.json", R"({"schema_version": 1, "sample_ids": ["q0", "q1", "q2", "q3"],
        "partitions": ["ensemble-train", "ensemble-train", "ensemble-train", "testing"]})");
}

}  // namespace

TEST_CASE("split prints counts near the default proportions")
{
    TempDir dir;
    balanced_labels(dir / "labels.csv", 5000, 8);
    std::ostringstream out;
    SplitCommand cmd;
    cmd.labels = dir / "labels.csv";
    cmd.seed = 1;
    cmd.out = dir / "split.json";
    cmd_split(cmd, out);
    const auto split = io::split_from_json(io::json::parse(io::read_file(cmd.out)));
    CHECK(std::abs(static_cast<long>(split.count(Partition::ModelTrain)) - 3250) <= 8);
    CHECK(std::abs(static_cast<long>(split.count(Partition::ModelVal)) - 501) <= 8);
    CHECK(std::abs(static_cast<long>(split.count(Partition::EnsembleTrain)) - 500) <= 8);
    CHECK(std::abs(static_cast<long>(split.count(Partition::Testing)) - 749) <= 8);
    CHECK(out.str().find("model-train") != std::string::npos);
    CHECK(out.str().find(std::to_string(split.count(Partition::Testing))) != std::string::npos);
}

TEST_CASE("split with --kfold writes every fold into one document")
{
    TempDir dir;
    balanced_labels(dir / "labels.csv", 200, 4);
    CHECK(run_cli("split " + (dir / "labels.csv").string() + " --seed 3 --kfold 5 --out " +
                  (dir / "split.json").string()) == 0);
    const auto doc = io::json::parse(io::read_file(dir / "split.json"));
    const auto folds = io::folds_from_json(doc);
    REQUIRE(folds.size() == 5);
    for (int f = 0; f < 5; ++f)
        CHECK(folds[static_cast<std::size_t>(f)].fold_index == f);
}

TEST_CASE("split rejects a malformed row naming its line")
{
    TempDir dir;
    write(dir / "labels.csv", "sample_id,label\na,0\nb\nc,1\n");
    SplitCommand cmd;
    cmd.labels = dir / "labels.csv";
    cmd.out = dir / "split.json";
    std::ostringstream out;
    CHECK_THROWS_WITH_AS(cmd_split(cmd, out), doctest::Contains(":3"), ParseError);
    CHECK(run_cli("split " + cmd.labels.string() + " --out " + cmd.out.string()) != 0);
    CHECK_FALSE(fs::exists(cmd.out));
}

TEST_CASE("pool mean-unweighted averages rows")
{
    TempDir dir;
    two_member_manifest(dir);
    CHECK(run_cli("pool " + (dir / "m.json").string() + " --pooler mean-unweighted --out " +
                  (dir / "out.csv").string()) == 0);
    const auto pooled = io::read_predictions_csv(dir / "out.csv");
    CHECK(pooled.class_names == std::vector<std::string>{"c0", "c1", "c2"});
    CHECK(pooled.matrix(0, 0) == doctest::Approx(0.6));
    CHECK(pooled.matrix(1, 2) == doctest::Approx(0.35));
    CHECK(pooled.matrix(3, 1) == doctest::Approx(0.425));
    CHECK_FALSE(fs::exists(dir / "pooler.json"));
}

TEST_CASE("fitted poolers need --fit-split")
{
    TempDir dir;
    two_member_manifest(dir);
    PoolCommand cmd;
    cmd.manifest = dir / "m.json";
    cmd.pooler = "logistic-regression";
    cmd.out = dir / "out.csv";
    std::ostringstream out;
    CHECK_THROWS_WITH(cmd_pool(cmd, out), doctest::Contains("--fit-split"));
    CHECK(run_cli("pool " + cmd.manifest.string() + " --pooler logistic-regression --out " + cmd.out.string()) != 0);
    CHECK(run_cli("pool " + cmd.manifest.string() + " --pooler median --out " + cmd.out.string()) != 0);

    cmd.fit_split = dir / "split.json";
    cmd_pool(cmd, out);
    CHECK(fs::exists(dir / "out.csv"));
    const auto state = io::json::parse(io::read_file(dir / "pooler.json"));
    CHECK(state.at("kind") == "logistic-regression");
    CHECK(state.at("member_count") == 2);
}

TEST_CASE("best-model output reproduces one member file")
{
    TempDir dir;
    two_member_manifest(dir);
    CHECK(run_cli("pool " + (dir / "m.json").string() + " --pooler best-model --fit-split " +
                  (dir / "split.json").string() + " --out " + (dir / "best.csv").string()) == 0);
    const auto best = io::read_predictions_csv(dir / "best.csv").matrix;
    const auto a = io::read_predictions_csv(dir / "a.csv").matrix;
    const auto b = io::read_predictions_csv(dir / "b.csv").matrix;
    CHECK((best == a || best == b));
    // Member a labels q0..q2 correctly (q2 via 0.4), b gets q0 and q2.
    CHECK(best == a);
}

TEST_CASE("evaluate writes the metrics report and ROC files")
{
    TempDir dir;
    write(dir / "p.csv", "sample_id,c0,c1,c2\n"
                         "s0,0.8,0.1,0.1\ns1,0.6,0.3,0.1\ns2,0.3,0.6,0.1\ns3,0.2,0.2,0.6\ns4,0.5,0.4,0.1\n"
                         "s5,0.1,0.8,0.1\ns6,0.2,0.7,0.1\ns7,0.1,0.1,0.8\ns8,0,0.3,0.7\ns9,0.1,0.5,0.4\n");
    write(dir / "l.csv", "sample_id,label\ns9,2\ns0,0\ns1,0\ns2,0\ns3,0\ns4,1\ns5,1\ns6,1\ns7,2\ns8,2\n");
    CHECK(run_cli("evaluate " + (dir / "p.csv").string() + " " + (dir / "l.csv").string() + " --out " +
                  (dir / "r.json").string() + " --roc-dir " + (dir / "roc").string()) == 0);
    const auto r = io::json::parse(io::read_file(dir / "r.json"));
    const auto& c0 = r.at("per_class").at(0);
    CHECK(c0.at("tp") == 2);
    CHECK(c0.at("fp") == 1);
    CHECK(c0.at("tn") == 5);
    CHECK(c0.at("fn") == 2);
    CHECK(c0.at("accuracy").get<double>() == doctest::Approx(0.7));
    CHECK(c0.at("f1").at("value").get<double>() == doctest::Approx(0.5714).epsilon(1e-4));
    CHECK(c0.at("sensitivity").at("value").get<double>() == doctest::Approx(0.5));
    CHECK(c0.at("fpr").at("value").get<double>() == doctest::Approx(0.1667).epsilon(1e-3));
    CHECK(r.at("macro").at("top1_error").get<double>() == doctest::Approx(0.4));
    for (int c = 0; c < 3; ++c)
        CHECK(fs::exists(dir / "roc" / ("class_" + std::to_string(c) + "_roc.csv")));
    CHECK(io::read_file(dir / "roc" / "class_0_roc.csv").rfind("threshold,fpr,tpr\n", 0) == 0);
}

TEST_CASE("evaluate on perfect and single-class inputs")
{
    TempDir dir;
    write(dir / "p.csv", "sample_id,a,b\nx,1,0\ny,0,1\n");
    write(dir / "l.csv", "sample_id,label\nx,0\ny,1\n");
    EvaluateCommand cmd{dir / "p.csv", dir / "l.csv", dir / "r.json", std::nullopt, false};
    std::ostringstream out;
    cmd_evaluate(cmd, out);
    CHECK(io::json::parse(io::read_file(dir / "r.json")).at("macro").at("f1") == 1.0);

    write(dir / "l.csv", "sample_id,label\nx,0\ny,0\n");
    cmd_evaluate(cmd, out);
    const auto r = io::json::parse(io::read_file(dir / "r.json"));
    CHECK(r.at("per_class").at(0).at("auc").is_null());
    CHECK(r.at("per_class").at(0).at("auc_error").get<std::string>().find("OneClassError") != std::string::npos);
    CHECK(r.at("per_class").at(0).at("fpr").at("degenerate") == true);
    CHECK(r.at("macro").at("accuracy").get<double>() == doctest::Approx(0.5));

    write(dir / "l.csv", "sample_id,label\nx,0\nz,0\n");
    CHECK_THROWS_AS(cmd_evaluate(cmd, out), AlignmentError);

    cmd.table = true;
    write(dir / "l.csv", "sample_id,label\nx,0\ny,1\n");
    std::ostringstream table;
    cmd_evaluate(cmd, table);
    CHECK(table.str().find("macro") != std::string::npos);
}

TEST_CASE("experiment reports are reproducible and complete")
{
    TempDir dir;
    write(dir / "stack.json", R"({
        "seed": 11,
        "dataset": {"n_samples": 600, "n_classes": 3, "n_features": 6, "label_noise": 0.05},
        "learners": [{"name": "a", "feature_subset_fraction": 0.5},
                     {"name": "b", "feature_subset_fraction": 0.5, "init_seed": 1},
                     {"name": "c", "feature_subset_fraction": 0.5, "init_seed": 2}],
        "scenarios": ["baseline", "stacking"],
        "poolers": ["all"]
    })");
    const std::string cfg = (dir / "stack.json").string();
    CHECK(run_cli("experiment " + cfg + " --out " + (dir / "r1.json").string()) == 0);
    CHECK(run_cli("experiment " + cfg + " --out " + (dir / "r2.json").string()) == 0);
    CHECK(io::read_file(dir / "r1.json") == io::read_file(dir / "r2.json"));
    const auto r = io::json::parse(io::read_file(dir / "r1.json"));
    int stacking = 0;
    for (const auto& entry : r.at("results"))
        stacking += entry.at("technique") == "stacking";
    CHECK(stacking == 12);
    REQUIRE(r.at("deltas").size() == 1);
    CHECK(r.at("deltas").at(0).contains("f1_gain_percent"));

    CHECK(run_cli("experiment " + cfg + " --seed 12 --out " + (dir / "r3.json").string()) == 0);
    CHECK(io::read_file(dir / "r1.json") != io::read_file(dir / "r3.json"));

    write(dir / "base.json", R"({"dataset": {"n_samples": 300, "n_classes": 3, "n_features": 4},
        "learners": [{"name": "a"}], "scenarios": ["baseline"]})");
    ExperimentCommand cmd{dir / "base.json", dir / "base_report.json", std::nullopt, false};
    std::ostringstream out;
    cmd_experiment(cmd, out);
    CHECK(io::json::parse(io::read_file(dir / "base_report.json")).at("deltas").empty());

    write(dir / "bad.json", R"({"learners": [{"name": "a", "patience": 0}]})");
    CHECK_THROWS_WITH_AS(cmd_experiment({dir / "bad.json", std::nullopt, std::nullopt, false}, out),
                         doctest::Contains("learners[0]"), ConfigError);
    CHECK(run_cli("experiment " + (dir / "bad.json").string()) != 0);
}

TEST_CASE("usage errors exit nonzero")
{
    CHECK(run_cli("") != 0);
    CHECK(run_cli("frobnicate") != 0);
    CHECK(run_cli("evaluate /nonexistent.csv /nonexistent.csv") != 0);
}
