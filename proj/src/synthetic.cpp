#include "intdim/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "intdim/error.hpp"
#include "intdim/random.hpp"

namespace intdim {

namespace {

enum Stream : std::uint64_t { SampleStream = 1, EmbeddingStream = 2 };

void sample_point(const ManifoldSpec& spec, Rng& rng, std::span<double> out) {
    switch (spec.kind) {
    case ManifoldKind::Cube:
        for (double& v : out) {
            v = rng.uniform();
        }
        break;
    case ManifoldKind::Gaussian:
        for (double& v : out) {
            v = rng.normal();
        }
        break;
    case ManifoldKind::Sphere: {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& v : out) {
                v = rng.normal();
                norm2 += v * v;
            }
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : out) {
            v *= inv;
        }
        break;
    }
    case ManifoldKind::SwissRoll: {
        const double t = rng.uniform(1.5 * std::numbers::pi, 4.5 * std::numbers::pi);
        const double h = rng.uniform(0.0, 10.0);
        out[0] = t * std::cos(t);
        out[1] = h;
        out[2] = t * std::sin(t);
        break;
    }
    }
}

// ambient x source matrix with orthonormal columns.
Eigen::MatrixXd random_orthonormal_frame(std::size_t ambient, std::size_t source, std::uint64_t seed) {
    Rng rng = Rng::substream(seed, EmbeddingStream);
    Eigen::MatrixXd gaussian(static_cast<Eigen::Index>(ambient), static_cast<Eigen::Index>(source));
    for (Eigen::Index c = 0; c < gaussian.cols(); ++c) {
        for (Eigen::Index r = 0; r < gaussian.rows(); ++r) {
            gaussian(r, c) = rng.normal();
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    return qr.householderQ() * Eigen::MatrixXd::Identity(gaussian.rows(), gaussian.cols());
}

} // namespace

std::string_view manifold_kind_name(ManifoldKind kind) noexcept {
    switch (kind) {
    case ManifoldKind::Cube: return "cube";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Gaussian: return "gaussian";
    case ManifoldKind::SwissRoll: return "swiss_roll";
    }
    return "unknown";
}

std::optional<ManifoldKind> parse_manifold_kind(std::string_view name) noexcept {
    for (auto kind : {ManifoldKind::Cube, ManifoldKind::Sphere, ManifoldKind::Gaussian, ManifoldKind::SwissRoll}) {
        if (manifold_kind_name(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

std::size_t source_dim(const ManifoldSpec& spec) noexcept {
    switch (spec.kind) {
    case ManifoldKind::Sphere: return spec.intrinsic_dim + 1;
    case ManifoldKind::SwissRoll: return 3;
    default: return spec.intrinsic_dim;
    }
}

void validate(const ManifoldSpec& spec) {
    const std::string kind(manifold_kind_name(spec.kind));
    if (spec.n_points == 0) {
        throw Error(ErrorCode::SpecInvalid, "n_points must be at least 1");
    }
    if (spec.intrinsic_dim == 0) {
        throw Error(ErrorCode::SpecInvalid, "intrinsic dimension must be at least 1");
    }
    if (spec.kind == ManifoldKind::SwissRoll && spec.intrinsic_dim != 2) {
        throw Error(ErrorCode::SpecInvalid, "swiss_roll has intrinsic dimension 2, got m = " +
                                                std::to_string(spec.intrinsic_dim));
    }
    if (spec.ambient_dim < source_dim(spec)) {
        throw Error(ErrorCode::SpecInvalid, kind + " with m = " + std::to_string(spec.intrinsic_dim) +
                                                " needs ambient dimension >= " + std::to_string(source_dim(spec)) +
                                                ", got " + std::to_string(spec.ambient_dim));
    }
}

DataMatrix generate(const ManifoldSpec& spec) {
    validate(spec);
    const std::size_t src = source_dim(spec);
    const std::size_t d = spec.ambient_dim;
    Rng rng = Rng::substream(spec.seed, SampleStream);

    auto out = DataMatrix::zeros(spec.n_points, d);
    if (src == d) {
        for (std::size_t i = 0; i < spec.n_points; ++i) {
            sample_point(spec, rng, out.row(i));
        }
        return out;
    }

    const Eigen::MatrixXd frame = random_orthonormal_frame(d, src, spec.seed);
    Eigen::VectorXd point(static_cast<Eigen::Index>(src));
    for (std::size_t i = 0; i < spec.n_points; ++i) {
        sample_point(spec, rng, std::span<double>(point.data(), src));
        Eigen::Map<Eigen::VectorXd> row(out.row(i).data(), static_cast<Eigen::Index>(d));
        row.noalias() = frame * point;
    }
    return out;
}

} // namespace intdim
