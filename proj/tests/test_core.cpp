#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>

#include "ensemblepool/core.hpp"
#include "helpers.hpp"

using namespace ensemblepool;

TEST_CASE("renormalize divides by the row sum")
{
    const std::vector<double> row{1.0, 3.0};
    const auto out = renormalize(row);
    CHECK(out[0] == doctest::Approx(0.25));
    CHECK(out[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(renormalize(std::vector<double>{0.0, 0.0}), DegenerateError);
    CHECK_THROWS_AS(renormalize(std::vector<double>{-0.1, 1.1}), ParameterError);
    CHECK_THROWS_AS(renormalize(std::vector<double>{NAN, 1.0}), ParameterError);
}

TEST_CASE("argmax breaks ties toward the lowest index")
{
    CHECK(argmax(std::vector<double>{0.2, 0.4, 0.4}) == 1);
    CHECK(argmax(std::vector<double>{0.5, 0.5}) == 0);
    CHECK(argmax(std::vector<double>{0.1, 0.2, 0.7}) == 2);
}

TEST_CASE("is_probability_row honours the tolerance")
{
    CHECK(is_probability_row(std::vector<double>{0.3, 0.7}));
    CHECK_FALSE(is_probability_row(std::vector<double>{0.3, 0.7 + 1e-4}));
    CHECK(is_probability_row(std::vector<double>{0.3, 0.7 + 1e-4}, 1e-3));
    CHECK_FALSE(is_probability_row(std::vector<double>{-0.1, 1.1}, 1.0));
}

TEST_CASE("PredictionMatrix rejects bad shapes and duplicate ids")
{
    CHECK_THROWS_AS(PredictionMatrix({"a", "b"}, 2, {0.5, 0.5, 1.0}), ShapeMismatchError);
    CHECK_THROWS_AS(PredictionMatrix({"a", "a"}, 1, {1.0, 1.0}), AlignmentError);
    const auto m = testing::matrix(2, {0.1, 0.9, 0.6, 0.4, 0.5, 0.5});
    CHECK(m.sample_count() == 3);
    CHECK(m(1, 0) == 0.6);
    const std::vector<std::size_t> pick{2, 0};
    const auto s = m.select(pick);
    CHECK(s.sample_ids() == std::vector<std::string>{"s2", "s0"});
    CHECK(s(1, 1) == 0.9);
}

TEST_CASE("LabelVector validates labels and ids")
{
    CHECK_THROWS_AS(LabelVector({"a", "b"}, {0, 2}, 2), ParameterError);
    CHECK_THROWS_AS(LabelVector({"a", "b"}, {0}, 2), AlignmentError);
    CHECK_THROWS_AS(LabelVector({"a", "a"}, {0, 1}, 2), AlignmentError);
    const auto y = testing::labels({0, 1, 1, 2}, 3);
    CHECK(y.class_counts() == std::vector<std::size_t>{1, 2, 1});
}

TEST_CASE("string forms of enums round-trip")
{
    for (auto p : {Partition::ModelTrain, Partition::ModelVal, Partition::EnsembleTrain, Partition::Testing,
                   Partition::FoldTrain, Partition::FoldVal})
        CHECK(partition_from_string(to_string(p)) == p);
    for (auto k : {SourceKind::Architecture, SourceKind::Fold, SourceKind::AugmentedCopy})
        CHECK(source_kind_from_string(to_string(k)) == k);
    CHECK(to_string(Partition::EnsembleTrain) == "ensemble-train");
    CHECK_THROWS(partition_from_string("nope"));
}

TEST_CASE("validate_bundle renormalizes small drift and rejects large drift")
{
    EnsembleBundle b;
    b.members.push_back({"a", SourceKind::Architecture, testing::matrix(2, {0.5, 0.5005, 0.2, 0.8})});
    const auto fixed = validate_bundle(b);
    CHECK(fixed.members[0].matrix(0, 0) + fixed.members[0].matrix(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fixed.members[0].matrix(1, 0) == 0.2);

    EnsembleBundle far;
    far.members.push_back({"a", SourceKind::Architecture, testing::matrix(2, {0.5, 0.52, 0.2, 0.8})});
    CHECK_THROWS_AS(validate_bundle(far), NormalizationError);
}

TEST_CASE("validate_bundle checks alignment across members and labels")
{
    EnsembleBundle b;
    b.members.push_back({"a", SourceKind::Architecture, testing::matrix(2, {0.5, 0.5, 0.2, 0.8})});
    b.members.push_back({"b", SourceKind::Architecture, PredictionMatrix({"s1", "s0"}, 2, {0.5, 0.5, 0.2, 0.8})});
    CHECK_THROWS_AS(validate_bundle(b), AlignmentError);

    b.members.pop_back();
    const auto y = testing::labels({0, 1}, 3);
    CHECK_THROWS_AS(validate_bundle(b, &y), LabelMismatchError);
    const LabelVector other({"x", "y"}, {0, 1}, 2);
    CHECK_THROWS(validate_bundle(b, &other));
}

TEST_CASE("parallel_for visits every index once and rethrows")
{
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
    for (auto& h : hits)
        CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 3) throw ParameterError("boom"); }, 3),
                    ParameterError);
}

TEST_CASE("worker_count follows ENSEMBLEPOOL_THREADS")
{
    setenv("ENSEMBLEPOOL_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    unsetenv("ENSEMBLEPOOL_THREADS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("mix_seed spreads nearby inputs")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 100; ++s)
        for (std::uint64_t salt = 0; salt < 5; ++salt)
            seen.insert(mix_seed(s, salt));
    CHECK(seen.size() == 500);
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}
