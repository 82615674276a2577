#ifndef INTDIM_ESTIMATOR_HPP
#define INTDIM_ESTIMATOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "data_matrix.hpp"
#include "knn.hpp"

namespace intdim {

inline constexpr std::size_t default_k = 20;

enum class Normalization {
    /// 1/(k-1) in front of the log-ratio sum.
    Standard,
    /// 1/(k-2); removes the small-sample bias of the local estimate. Needs k >= 3.
    BiasCorrected,
};

struct EstimatorOptions {
    Normalization normalization = Normalization::Standard;
};

/// Global maximum-likelihood intrinsic dimension plus the per-point estimates it aggregates.
struct IdEstimate {
    double global_id = 0.0;
    std::vector<double> per_point_ids;
    std::size_t k = 0;
    std::size_t n_points = 0;
};

/// Sum over j < k of ln(T_k / T_j) for one sorted distance profile T_1..T_k.
double log_ratio_sum(std::span<const double> distances);

/// Local estimate from a single sorted distance profile (k = distances.size()).
double local_id(std::span<const double> distances, const EstimatorOptions& options = {});

double local_id(const NeighborTable& neighbors, std::size_t point, const EstimatorOptions& options = {});

/**
 * Global estimate: N(k-1) over the log-ratio sum across all points, which is the
 * harmonic mean of the local estimates. Summation runs over points in index
 * order. Any point whose log-ratio sum is zero raises DegenerateNeighborhood.
 */
IdEstimate global_id(const NeighborTable& neighbors, const EstimatorOptions& options = {});

IdEstimate estimate_dataset(const DataMatrix& data, std::size_t k = default_k,
                            const EstimatorOptions& options = {}, const KnnOptions& knn = {});

} // namespace intdim

#endif
