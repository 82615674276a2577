#ifndef INTDIM_TEST_SUPPORT_HPP
#define INTDIM_TEST_SUPPORT_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "intdim/data_matrix.hpp"

namespace intdim::testing {

inline DataMatrix random_matrix(std::size_t n, std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> values(n * d);
    for (double& v : values) {
        v = normal(rng);
    }
    return DataMatrix(n, d, std::move(values));
}

inline Eigen::MatrixXd random_orthogonal(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        g.data()[i] = normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ();
}

/// x -> Q x + shift for every row.
inline DataMatrix rigid_motion(const DataMatrix& data, const Eigen::MatrixXd& rotation, const Eigen::VectorXd& shift) {
    const auto d = static_cast<Eigen::Index>(data.n_dims());
    std::vector<double> out(data.values().size());
    for (std::size_t i = 0; i < data.n_points(); ++i) {
        Eigen::Map<const Eigen::VectorXd> x(data.row(i).data(), d);
        Eigen::Map<Eigen::VectorXd> y(out.data() + i * data.n_dims(), d);
        y = rotation * x + shift;
    }
    return DataMatrix(data.n_points(), data.n_dims(), std::move(out));
}

inline DataMatrix scaled(const DataMatrix& data, double c) {
    std::vector<double> out(data.values().begin(), data.values().end());
    for (double& v : out) {
        v *= c;
    }
    return DataMatrix(data.n_points(), data.n_dims(), std::move(out));
}

/// Appends `extra` columns holding the constant `value`.
inline DataMatrix padded(const DataMatrix& data, std::size_t extra, double value) {
    const std::size_t d = data.n_dims() + extra;
    std::vector<double> out;
    out.reserve(data.n_points() * d);
    for (std::size_t i = 0; i < data.n_points(); ++i) {
        const auto r = data.row(i);
        out.insert(out.end(), r.begin(), r.end());
        out.insert(out.end(), extra, value);
    }
    return DataMatrix(data.n_points(), d, std::move(out));
}

inline double relative_difference(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("intdim_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Binary PGM (channels == 1) or PPM (channels == 3), 8-bit, interleaved samples.
inline void write_pnm(const std::filesystem::path& path, std::size_t height, std::size_t width, std::size_t channels,
                      const std::vector<std::uint8_t>& samples) {
    std::ofstream out(path, std::ios::binary);
    out << (channels == 1 ? "P5" : "P6") << "\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(samples.data()), static_cast<std::streamsize>(samples.size()));
}

} // namespace intdim::testing

#endif
