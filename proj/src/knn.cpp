#include "intdim/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <cblas.h>

#include "intdim/error.hpp"
#include "intdim/parallel.hpp"

namespace intdim {

namespace {

struct Candidate {
    double key;
    std::uint64_t index;
};

bool operator<(const Candidate& a, const Candidate& b) noexcept {
    return a.key < b.key || (a.key == b.key && a.index < b.index);
}

// Extra screened candidates kept per point beyond k.
constexpr std::size_t screening_slack = 8;
constexpr std::size_t max_block_rows = 512;

// gamma_n = n u / (1 - n u): the classic bound on relative error of an n-term dot product.
double gamma(std::size_t n) {
    const double u = std::numeric_limits<double>::epsilon() / 2;
    const double nu = static_cast<double>(n) * u;
    return nu / (1.0 - nu);
}

// Keeps the `capacity` smallest candidates as a max-heap.
class CandidateHeap {
public:
    CandidateHeap(Candidate* storage, std::size_t capacity) : data_(storage), capacity_(capacity) {}

    void offer(Candidate c, std::size_t& size) {
        if (size < capacity_) {
            data_[size++] = c;
            std::push_heap(data_, data_ + size);
        } else if (c < data_[0]) {
            std::pop_heap(data_, data_ + size);
            data_[size - 1] = c;
            std::push_heap(data_, data_ + size);
        }
    }

private:
    Candidate* data_;
    std::size_t capacity_;
};

struct Neighbor {
    double distance;
    std::uint64_t index;
};

bool operator<(const Neighbor& a, const Neighbor& b) noexcept {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

// Writes the first k of the sorted neighbor list into row `i` of the output and
// records zero-distance pairs.
void emit_row(std::size_t i, std::size_t k, std::vector<Neighbor>& neighbors, std::vector<double>& distances,
              std::vector<std::uint64_t>& ids, std::vector<IndexPair>& zero_pairs) {
    std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<std::ptrdiff_t>(k), neighbors.end());
    for (std::size_t j = 0; j < k; ++j) {
        distances[i * k + j] = neighbors[j].distance;
        ids[i * k + j] = neighbors[j].index;
        if (neighbors[j].distance == 0.0) {
            const auto other = static_cast<std::size_t>(neighbors[j].index);
            zero_pairs.emplace_back(std::min(i, other), std::max(i, other));
        }
    }
}

void throw_if_duplicates(std::vector<std::vector<IndexPair>>& per_worker) {
    std::vector<IndexPair> pairs;
    for (auto& chunk : per_worker) {
        pairs.insert(pairs.end(), chunk.begin(), chunk.end());
    }
    if (pairs.empty()) {
        return;
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    throw DuplicatePointsError(std::move(pairs));
}

void full_scan(const DataMatrix& data, std::size_t i, std::vector<Neighbor>& out) {
    out.clear();
    const auto xi = data.row(i);
    for (std::size_t j = 0; j < data.n_points(); ++j) {
        if (j != i) {
            out.push_back({euclidean_distance(xi, data.row(j)), j});
        }
    }
}

} // namespace

NeighborTable::NeighborTable(std::size_t n_points, std::size_t k, std::vector<double> distances,
                             std::vector<std::uint64_t> neighbor_ids)
    : n_points_(n_points), k_(k), distances_(std::move(distances)), ids_(std::move(neighbor_ids)) {
    if (distances_.size() != n_points * k || ids_.size() != n_points * k) {
        throw Error(ErrorCode::InconsistentDims, "neighbor table arrays do not match n_points x k");
    }
}

void check_k(std::size_t n_points, std::size_t k) {
    if (k < 2 || n_points < 3 || k > n_points - 1) {
        throw Error(ErrorCode::InvalidK, "k = " + std::to_string(k) + " is outside [2, n_points - 1] for n_points = " +
                                             std::to_string(n_points));
    }
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
    // Four interleaved accumulators combined in a fixed order.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t n = a.size();
    std::size_t l = 0;
    for (; l + 4 <= n; l += 4) {
        const double d0 = a[l] - b[l];
        const double d1 = a[l + 1] - b[l + 1];
        const double d2 = a[l + 2] - b[l + 2];
        const double d3 = a[l + 3] - b[l + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    for (; l < n; ++l) {
        const double dl = a[l] - b[l];
        s0 += dl * dl;
    }
    return std::sqrt((s0 + s1) + (s2 + s3));
}

NeighborTable naive_neighbor_table(const DataMatrix& data, std::size_t k) {
    const std::size_t n = data.n_points();
    check_k(n, k);
    std::vector<double> distances(n * k);
    std::vector<std::uint64_t> ids(n * k);
    std::vector<std::vector<IndexPair>> zero_pairs(1);
    std::vector<Neighbor> row;
    for (std::size_t i = 0; i < n; ++i) {
        full_scan(data, i, row);
        std::sort(row.begin(), row.end());
        emit_row(i, k, row, distances, ids, zero_pairs[0]);
    }
    throw_if_duplicates(zero_pairs);
    return NeighborTable(n, k, std::move(distances), std::move(ids));
}

NeighborTable build_neighbor_table(const DataMatrix& data, std::size_t k, const KnnOptions& options) {
    const std::size_t n = data.n_points();
    const std::size_t d = data.n_dims();
    check_k(n, k);
    const std::size_t workers = options.workers ? options.workers : num_workers();
    openblas_set_num_threads(static_cast<int>(workers));

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.row(i);
        for (std::size_t l = 0; l < d; ++l) {
            mean[l] += x[l];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(n);
    }

    std::vector<double> norms(n);
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto x = data.row(i);
            double s = 0.0;
            for (std::size_t l = 0; l < d; ++l) {
                const double z = x[l] - mean[l];
                s += z * z;
            }
            norms[i] = s;
        }
    });
    const double max_norm = *std::max_element(norms.begin(), norms.end());

    std::size_t block = options.block_rows;
    if (block == 0) {
        block = std::clamp<std::size_t>(options.block_bytes / (sizeof(double) * d), 1, max_block_rows);
    }
    block = std::min(block, n);

    const std::size_t capacity = std::min(k + screening_slack, n - 1);
    std::vector<Candidate> heap_storage(n * capacity);
    std::vector<std::size_t> heap_size(n, 0);

    std::vector<double> left(block * d);
    std::vector<double> right(block * d);
    std::vector<double> gram(block * block);

    auto center_rows = [&](std::size_t first, std::size_t count, std::vector<double>& out) {
        parallel_for(count, workers, [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                const auto x = data.row(first + r);
                double* z = out.data() + r * d;
                for (std::size_t l = 0; l < d; ++l) {
                    z[l] = x[l] - mean[l];
                }
            }
        });
    };

    // Offers every pair (row of `owner` block, row of `other` block) to the owner's heap.
    auto offer_block = [&](std::size_t owner_first, std::size_t owner_count, std::size_t other_first,
                           std::size_t other_count, bool owner_is_left) {
        parallel_for(owner_count, workers, [&](std::size_t begin, std::size_t end) {
            for (std::size_t a = begin; a < end; ++a) {
                const std::size_t i = owner_first + a;
                CandidateHeap heap(heap_storage.data() + i * capacity, capacity);
                for (std::size_t b = 0; b < other_count; ++b) {
                    const std::size_t j = other_first + b;
                    if (j == i) {
                        continue;
                    }
                    const double dot = owner_is_left ? gram[a * other_count + b] : gram[b * owner_count + a];
                    const double sq = std::max(0.0, norms[i] + norms[j] - 2.0 * dot);
                    heap.offer({sq, j}, heap_size[i]);
                }
            }
        });
    };

    for (std::size_t bi = 0; bi < n; bi += block) {
        const std::size_t ni = std::min(block, n - bi);
        center_rows(bi, ni, left);
        for (std::size_t bj = bi; bj < n; bj += block) {
            const std::size_t nj = std::min(block, n - bj);
            const double* rhs = left.data();
            if (bj != bi) {
                center_rows(bj, nj, right);
                rhs = right.data();
            }
            cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(ni), static_cast<int>(nj),
                        static_cast<int>(d), 1.0, left.data(), static_cast<int>(d), rhs, static_cast<int>(d), 0.0,
                        gram.data(), static_cast<int>(nj));
            offer_block(bi, ni, bj, nj, true);
            if (bj != bi) {
                offer_block(bj, nj, bi, ni, false);
            }
        }
    }

    // Screened squared distances are within `margin` of the directly computed ones,
    // so every true neighbor has a screened value <= (k-th screened) + 2 margin.
    const double kappa = 16.0 * gamma(d + 8);
    std::vector<double> distances(n * k);
    std::vector<std::uint64_t> ids(n * k);
    const std::size_t n_slices = std::min(workers, n);
    std::vector<std::vector<IndexPair>> zero_pairs(n_slices);
    parallel_for(n_slices, n_slices, [&](std::size_t slice_begin, std::size_t slice_end) {
        std::vector<Candidate> sorted;
        std::vector<Neighbor> row;
        for (std::size_t slice = slice_begin; slice < slice_end; ++slice) {
            const std::size_t i_begin = n * slice / n_slices;
            const std::size_t i_end = n * (slice + 1) / n_slices;
            for (std::size_t i = i_begin; i < i_end; ++i) {
                const Candidate* heap = heap_storage.data() + i * capacity;
                sorted.assign(heap, heap + heap_size[i]);
                std::sort(sorted.begin(), sorted.end());
                const double threshold = sorted[k - 1].key + 2.0 * kappa * (norms[i] + max_norm);
                if (capacity < n - 1 && sorted.back().key <= threshold) {
                    full_scan(data, i, row);
                } else {
                    row.clear();
                    const auto xi = data.row(i);
                    for (const Candidate& c : sorted) {
                        if (c.key > threshold) {
                            break;
                        }
                        row.push_back({euclidean_distance(xi, data.row(c.index)), c.index});
                    }
                }
                emit_row(i, k, row, distances, ids, zero_pairs[slice]);
            }
        }
    });
    throw_if_duplicates(zero_pairs);
    return NeighborTable(n, k, std::move(distances), std::move(ids));
}

} // namespace intdim
