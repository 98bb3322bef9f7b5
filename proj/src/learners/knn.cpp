#include "ensemblepool/learners.hpp"

namespace ensemblepool {

KnnModel fit_knn(const TrainSet& train, int k)
{
    if (k < 1)
        throw ParameterError("kNN needs k >= 1");
    train.validate();
    return {train.features, train.labels, train.class_count, k};
}

}  // namespace ensemblepool
