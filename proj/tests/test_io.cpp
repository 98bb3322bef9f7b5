#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ensemblepool/io.hpp"
#include "helpers.hpp"

using namespace ensemblepool;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("ensemblepool_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("prediction CSV round-trips at ten significant digits")
{
    std::mt19937_64 rng(1);
    const auto m = testing::random_matrix(rng, 25, 4);
    const std::vector<std::string> names{"a", "b", "c", "d"};
    const auto text = io::format_predictions_csv(m, names);
    const auto first = io::parse_predictions_csv(text);
    CHECK(first.class_names == names);
    const auto second = io::parse_predictions_csv(io::format_predictions_csv(first.matrix, names));
    CHECK(second.matrix == first.matrix);
    for (std::size_t i = 0; i < m.values().size(); ++i)
        CHECK(first.matrix.values()[i] == doctest::Approx(m.values()[i]).epsilon(1e-9));
    CHECK(text.rfind("sample_id,a,b,c,d\n", 0) == 0);
}

TEST_CASE("malformed prediction rows name their line")
{
    CHECK_THROWS_WITH_AS(io::parse_predictions_csv("sample_id,a,b\nx,0.5,0.5\ny,0.5\n", "p.csv"),
                         doctest::Contains("p.csv:3"), ParseError);
    CHECK_THROWS_WITH_AS(io::parse_predictions_csv("sample_id,a,b\nx,0.5,abc\n", "p.csv"),
                         doctest::Contains("p.csv:2"), ParseError);
    CHECK_THROWS_AS(io::parse_predictions_csv("id,a\n"), ParseError);
    CHECK_THROWS_AS(io::parse_predictions_csv(""), ParseError);
    CHECK_THROWS_AS(io::parse_predictions_csv("sample_id,a,b\nx,0.5,0.5\nx,0.5,0.5\n"), AlignmentError);
    // CRLF line endings are accepted.
    CHECK(io::parse_predictions_csv("sample_id,a,b\r\nx,0.25,0.75\r\n").matrix(0, 1) == 0.75);
}

TEST_CASE("labels CSV parsing and alignment")
{
    const auto y = io::parse_labels_csv("sample_id,label\nb,1\na,0\nc,2\n", 3);
    CHECK(y.labels() == std::vector<int>{1, 0, 2});
    CHECK_THROWS_WITH_AS(io::parse_labels_csv("sample_id,label\na,0\nb,3\n", 3, "l.csv"), doctest::Contains("l.csv:3"),
                         ParseError);
    CHECK_THROWS_AS(io::parse_labels_csv("sample_id,label\na,x\n", 3), ParseError);
    CHECK_THROWS_AS(io::parse_labels_csv("sample_id,label\na,1.5\n", 3), ParseError);
    CHECK_THROWS_AS(io::parse_labels_csv("id,label\n", 3), ParseError);

    const auto aligned = io::align_labels(y, {"a", "b", "c"});
    CHECK(aligned.labels() == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(io::align_labels(y, {"a", "b", "d"}), AlignmentError);
    CHECK_THROWS_AS(io::align_labels(y, {"a", "b"}), AlignmentError);
}

TEST_CASE("class count is inferred from the largest label")
{
    TempDir dir;
    write(dir.path / "l.csv", "sample_id,label\na,0\nb,4\nc,2\n");
    CHECK(io::infer_class_count(dir.path / "l.csv") == 5);
}

TEST_CASE("ROC CSV lists threshold, fpr, tpr")
{
    const std::vector<double> s{0.9, 0.2};
    const bool pos[] = {true, false};
    const auto csv = io::format_roc_csv(roc_auc(s, pos));
    CHECK(csv == "threshold,fpr,tpr\ninf,0,0\n0.9,0,1\n0.2,1,1\n");
}

TEST_CASE("split documents round-trip")
{
    SplitAssignment s{{"a", "b", "c", "d"},
                      {Partition::ModelTrain, Partition::ModelVal, Partition::EnsembleTrain, Partition::Testing},
                      std::nullopt};
    SplitAssignment f = s;
    f.partitions[0] = Partition::FoldTrain;
    f.partitions[1] = Partition::FoldVal;
    f.fold_index = 0;
    const auto doc = io::split_to_json(s, {f});
    CHECK(doc.at("counts").at("testing") == 1);
    CHECK(io::split_from_json(doc) == s);
    const auto folds = io::folds_from_json(doc);
    REQUIRE(folds.size() == 1);
    CHECK(folds[0] == f);
    auto broken = doc;
    broken["partitions"].erase(0);
    CHECK_THROWS_AS(io::split_from_json(broken), ParseError);
    broken = doc;
    broken["partitions"][0] = "training";
    CHECK_THROWS(io::split_from_json(broken));
}

TEST_CASE("fitted poolers serialize and reload to identical outputs")
{
    std::mt19937_64 rng(2);
    const auto b = testing::random_bundle(rng, 3, 40, 3);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i)
        y[i] = static_cast<int>(argmax(b.members[i % 3].matrix.row(i)));
    const auto labels = testing::labels(y, 3);
    for (auto kind : kAllPoolerKinds) {
        CAPTURE(to_string(kind));
        const auto fitted = fit_pooler(kind, b, labels);
        const auto doc = io::pooler_to_json(fitted);
        CHECK(doc.at("kind") == to_string(kind));
        CHECK(doc.at("schema_version") == io::kSchemaVersion);
        const auto reloaded = io::pooler_from_json(io::json::parse(doc.dump()));
        CHECK(pool(reloaded, b) == pool(fitted, b));
    }
    auto doc = io::pooler_to_json(fit_pooler(PoolerKind::BestModel, b, labels));
    doc["schema_version"] = 99;
    CHECK_THROWS_AS(io::pooler_from_json(doc), ParseError);
}

TEST_CASE("config parsing reports field paths")
{
    const auto good = io::json::parse(R"({
        "seed": 4,
        "dataset": {"n_samples": 300, "n_classes": 3, "n_features": 4},
        "learners": [{"name": "a"}, {"name": "b", "feature_subset_fraction": 0.5}],
        "scenarios": ["baseline", "stacking"],
        "poolers": ["all"]
    })");
    const auto cfg = io::config_from_json(good);
    CHECK(cfg.seed == 4);
    CHECK(cfg.learners.size() == 2);
    CHECK(cfg.learners[1].feature_subset_fraction == 0.5);
    CHECK(cfg.poolers.size() == 12);

    auto bad = good;
    bad["learners"][1]["learning_rate"] = "fast";
    CHECK_THROWS_WITH_AS(io::config_from_json(bad), doctest::Contains("learners[1].learning_rate"), ConfigError);
    bad = good;
    bad["scenarios"][1] = "boosting";
    CHECK_THROWS_WITH_AS(io::config_from_json(bad), doctest::Contains("scenarios[1]"), ConfigError);
    bad = good;
    bad["poolers"] = {"mean-unweighted", "median"};
    CHECK_THROWS_WITH_AS(io::config_from_json(bad), doctest::Contains("poolers[1]"), ConfigError);
    bad = good;
    bad["dataset"]["n_classes"] = 1;
    CHECK_THROWS_WITH_AS(io::config_from_json(bad), doctest::Contains("dataset"), ConfigError);
    CHECK_THROWS_AS(io::config_from_json(io::json::array()), ConfigError);
}

TEST_CASE("manifests resolve relative paths and renormalize drift")
{
    TempDir dir;
    fs::create_directories(dir.path / "preds");
    write(dir.path / "preds" / "a.csv", "sample_id,x,y\ns0,0.2,0.8\ns1,0.6,0.4002\n");
    write(dir.path / "preds" / "b.csv", "sample_id,x,y\ns0,0.5,0.5\ns1,0.1,0.9\n");
    write(dir.path / "labels.csv", "sample_id,label\ns0,1\ns1,0\n");
    write(dir.path / "m.json", R"({"schema_version": 1, "class_names": ["x", "y"], "labels": "labels.csv",
        "members": [{"name": "a", "path": "preds/a.csv"},
                    {"name": "b", "path": "preds/b.csv", "source_kind": "fold"}]})");
    const auto manifest = io::read_manifest(dir.path / "m.json");
    CHECK(manifest.labels == dir.path / "labels.csv");
    CHECK(manifest.members[1].source_kind == SourceKind::Fold);
    const auto bundle = io::load_bundle(manifest);
    CHECK(bundle.member_count() == 2);
    CHECK(bundle.members[0].matrix(1, 0) + bundle.members[0].matrix(1, 1) == doctest::Approx(1.0).epsilon(1e-15));

    write(dir.path / "preds" / "b.csv", "sample_id,x,y\ns1,0.5,0.5\ns0,0.1,0.9\n");
    CHECK_THROWS_AS(io::load_bundle(manifest), AlignmentError);
    write(dir.path / "preds" / "b.csv", "sample_id,x,y,z\ns0,0.5,0.5,0\ns1,0.1,0.9,0\n");
    CHECK_THROWS_AS(io::load_bundle(manifest), AlignmentError);
    write(dir.path / "m.json", R"({"schema_version": 2, "class_names": [], "members": []})");
    CHECK_THROWS_AS(io::read_manifest(dir.path / "m.json"), ParseError);
}

TEST_CASE("atomic writes leave no temp file behind")
{
    TempDir dir;
    io::write_atomic(dir.path / "sub" / "out.txt", "hello");
    CHECK(io::read_file(dir.path / "sub" / "out.txt") == "hello");
    CHECK_FALSE(fs::exists(dir.path / "sub" / "out.txt.tmp"));
}
