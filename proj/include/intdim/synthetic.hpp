#ifndef INTDIM_SYNTHETIC_HPP
#define INTDIM_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "data_matrix.hpp"

namespace intdim {

enum class ManifoldKind { Cube, Sphere, Gaussian, SwissRoll };

std::string_view manifold_kind_name(ManifoldKind kind) noexcept;
std::optional<ManifoldKind> parse_manifold_kind(std::string_view name) noexcept;

struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::Cube;
    std::size_t intrinsic_dim = 1;
    std::size_t ambient_dim = 1;
    std::size_t n_points = 1;
    std::uint64_t seed = 0;
};

/// Coordinates the manifold is sampled in before embedding: m for cube and
/// gaussian, m+1 for sphere, 3 for swiss roll.
std::size_t source_dim(const ManifoldSpec& spec) noexcept;

/// Throws Error(SpecInvalid) when the dimension constraints for the kind do not hold.
void validate(const ManifoldSpec& spec);

/**
 * Seeded sample from a manifold of known dimension.
 *
 * Points are drawn in source_dim() coordinates and mapped into R^ambient_dim by
 * the first source_dim() columns of a random orthogonal matrix (equivalently,
 * zero-padding followed by a random rotation). When ambient_dim equals
 * source_dim() the points are returned unrotated.
 */
DataMatrix generate(const ManifoldSpec& spec);

} // namespace intdim

#endif
