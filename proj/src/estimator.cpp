#include "intdim/estimator.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "intdim/error.hpp"

namespace intdim {

namespace {

double normalizer(std::size_t k, Normalization normalization) {
    if (normalization == Normalization::BiasCorrected) {
        if (k < 3) {
            throw Error(ErrorCode::InvalidK, "the bias-corrected estimator needs k >= 3");
        }
        return static_cast<double>(k - 2);
    }
    return static_cast<double>(k - 1);
}

} // namespace

double log_ratio_sum(std::span<const double> distances) {
    if (distances.size() < 2) {
        throw Error(ErrorCode::InvalidK, "a distance profile needs k >= 2 entries");
    }
    const double outer = distances.back();
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < distances.size(); ++j) {
        sum += std::log(outer / distances[j]);
    }
    return sum;
}

double local_id(std::span<const double> distances, const EstimatorOptions& options) {
    const double sum = log_ratio_sum(distances);
    const double norm = normalizer(distances.size(), options.normalization);
    if (!(sum > 0.0)) {
        throw Error(ErrorCode::DegenerateNeighborhood,
                    "all neighbor distances equal the k-th; the local estimate is unbounded");
    }
    return norm / sum;
}

double local_id(const NeighborTable& neighbors, std::size_t point, const EstimatorOptions& options) {
    if (point >= neighbors.n_points()) {
        throw Error(ErrorCode::InvalidArgument, "point index " + std::to_string(point) + " out of range");
    }
    return local_id(neighbors.distances(point), options);
}

IdEstimate global_id(const NeighborTable& neighbors, const EstimatorOptions& options) {
    const std::size_t n = neighbors.n_points();
    const std::size_t k = neighbors.k();
    const double norm = normalizer(k, options.normalization);

    IdEstimate result;
    result.k = k;
    result.n_points = n;
    result.per_point_ids.resize(n);

    double total = 0.0;
    std::vector<std::size_t> degenerate;
    for (std::size_t i = 0; i < n; ++i) {
        const double sum = log_ratio_sum(neighbors.distances(i));
        if (!(sum > 0.0)) {
            degenerate.push_back(i);
            continue;
        }
        result.per_point_ids[i] = norm / sum;
        total += sum;
    }
    if (!degenerate.empty()) {
        std::ostringstream msg;
        msg << degenerate.size() << " point(s) have all k neighbors equidistant (first: " << degenerate.front()
            << "); the estimate is unbounded there";
        throw Error(ErrorCode::DegenerateNeighborhood, msg.str());
    }
    result.global_id = static_cast<double>(n) * norm / total;
    return result;
}

IdEstimate estimate_dataset(const DataMatrix& data, std::size_t k, const EstimatorOptions& options,
                            const KnnOptions& knn) {
    return global_id(build_neighbor_table(data, k, knn), options);
}

} // namespace intdim
