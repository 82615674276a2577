#ifndef INTDIM_KNN_HPP
#define INTDIM_KNN_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "data_matrix.hpp"

namespace intdim {

/**
 * The k nearest neighbors of every point, self excluded.
 *
 * Row i holds the distances T_1 <= ... <= T_k from point i and the matching
 * neighbor indices. Ties in distance are ordered by ascending neighbor index.
 * Every stored distance is strictly positive.
 */
class NeighborTable {
public:
    NeighborTable(std::size_t n_points, std::size_t k, std::vector<double> distances,
                  std::vector<std::uint64_t> neighbor_ids);

    std::size_t n_points() const noexcept { return n_points_; }
    std::size_t k() const noexcept { return k_; }

    std::span<const double> distances(std::size_t i) const noexcept {
        return {distances_.data() + i * k_, k_};
    }
    std::span<const std::uint64_t> neighbor_ids(std::size_t i) const noexcept {
        return {ids_.data() + i * k_, k_};
    }

    /// Row-major n_points x k views of the whole table.
    std::span<const double> all_distances() const noexcept { return distances_; }
    std::span<const std::uint64_t> all_neighbor_ids() const noexcept { return ids_; }

private:
    std::size_t n_points_;
    std::size_t k_;
    std::vector<double> distances_;
    std::vector<std::uint64_t> ids_;
};

struct KnnOptions {
    /// Rows per distance block; 0 picks a size from the memory budget.
    std::size_t block_rows = 0;
    /// Bytes allowed per centered row block (two are live at once).
    std::size_t block_bytes = std::size_t{256} << 20;
    /// 0 uses num_workers().
    std::size_t workers = 0;
};

/// Throws Error(InvalidK) unless 2 <= k <= n_points - 1.
void check_k(std::size_t n_points, std::size_t k);

/**
 * Exact k-NN table via blocked Gram products.
 *
 * Candidates are screened with squared distances from the expansion
 * |a|^2 + |b|^2 - 2 a.b on column-centered blocks, clamped at 0. Every candidate
 * that could belong to the true neighborhood under a rounding-error bound is
 * then re-measured with the direct difference formula, so the result matches
 * naive_neighbor_table() bit for bit and does not depend on block size or
 * worker count.
 */
NeighborTable build_neighbor_table(const DataMatrix& data, std::size_t k, const KnnOptions& options = {});

/// O(N^2 d) reference: full distance row per point, sorted. Verification only.
NeighborTable naive_neighbor_table(const DataMatrix& data, std::size_t k);

/// Direct l2 distance; the one formula both paths use for stored distances.
double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept;

} // namespace intdim

#endif
