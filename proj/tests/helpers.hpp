#pragma once

#include <random>
#include <string>
#include <vector>

#include "ensemblepool/core.hpp"

namespace testing {

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "s")
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(prefix + std::to_string(i));
    return out;
}

inline ensemblepool::PredictionMatrix matrix(std::size_t classes, std::vector<double> values)
{
    const std::size_t n = values.size() / classes;
    return {ids(n), classes, std::move(values)};
}

inline ensemblepool::LabelVector labels(std::vector<int> y, std::size_t classes)
{
    const std::size_t n = y.size();
    return {ids(n), std::move(y), classes};
}

/// Random probability rows drawn from a flat Dirichlet.
inline ensemblepool::PredictionMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t classes)
{
    std::exponential_distribution<double> draw(1.0);
    std::vector<double> values(n * classes);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c)
            sum += values[i * classes + c] = draw(rng);
        for (std::size_t c = 0; c < classes; ++c)
            values[i * classes + c] /= sum;
    }
    return {ids(n), classes, std::move(values)};
}

inline ensemblepool::EnsembleBundle random_bundle(std::mt19937_64& rng, std::size_t members, std::size_t n,
                                                  std::size_t classes)
{
    ensemblepool::EnsembleBundle bundle;
    for (std::size_t m = 0; m < members; ++m)
        bundle.members.push_back({"m" + std::to_string(m), ensemblepool::SourceKind::Architecture,
                                  random_matrix(rng, n, classes)});
    return bundle;
}

}  // namespace testing
