#ifndef INTDIM_INGEST_HPP
#define INTDIM_INGEST_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "data_matrix.hpp"

namespace intdim {

enum class SourceKind {
    /// `path` column names an image file, relative to the manifest directory.
    ImagePath,
    /// `path` column is a zero-based row index into a raw matrix.
    MatrixRow,
};

struct LabeledItem {
    std::string source_ref;
    int label = 0;
};

/// Items with binary labels; source_refs are unique.
class LabeledCollection {
public:
    LabeledCollection(std::vector<LabeledItem> items, SourceKind kind, std::filesystem::path base_dir,
                      std::string name);

    const std::vector<LabeledItem>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    SourceKind source_kind() const noexcept { return kind_; }
    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
    const std::string& name() const noexcept { return name_; }

    std::array<std::size_t, 2> label_counts() const noexcept;

    /// Image path for item i, resolved against base_dir when relative.
    std::filesystem::path resolve(std::size_t i) const;
    /// Row index for item i in MatrixRow collections.
    std::size_t row_index(std::size_t i) const;

    LabeledCollection with_items(std::vector<LabeledItem> items) const;

private:
    std::vector<LabeledItem> items_;
    SourceKind kind_;
    std::filesystem::path base_dir_;
    std::string name_;
};

/// Reads a `path,label` manifest. Errors are MalformedManifest with the 1-based line number.
LabeledCollection load_labels(const std::filesystem::path& manifest, SourceKind kind = SourceKind::ImagePath);

/// Same as load_labels, from in-memory text.
LabeledCollection parse_labels(std::string_view text, SourceKind kind, std::filesystem::path base_dir,
                               std::string name);

/**
 * Exactly total/2 items of each label, drawn uniformly without replacement and
 * then shuffled. Deterministic for a given seed.
 */
LabeledCollection stratified_sample(const LabeledCollection& coll, std::size_t total, std::uint64_t seed);

/// total items drawn uniformly without replacement, labels ignored.
LabeledCollection uniform_sample(const LabeledCollection& coll, std::size_t total, std::uint64_t seed);

enum class ChannelPolicy { GrayscaleAverage, FirstChannel, KeepAllFlattened };

std::string_view channel_policy_name(ChannelPolicy policy) noexcept;
std::optional<ChannelPolicy> parse_channel_policy(std::string_view name) noexcept;

/// Values are always scaled to [0, 255].
struct PreprocessSpec {
    std::size_t height = 224;
    std::size_t width = 224;
    ChannelPolicy channels = ChannelPolicy::GrayscaleAverage;
};

/// Decoded image with interleaved channels in [0, 255].
struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> pixels;
};

/// PNG, JPEG, or binary PGM/PPM. Alpha is dropped; 16-bit samples are scaled to [0, 255].
Image read_image(const std::filesystem::path& path);

/// Bilinear resize with half-pixel centers; an identity when the size is unchanged.
Image resize_bilinear(const Image& image, std::size_t height, std::size_t width);

/// Resize, reduce channels, and flatten row-major (channel fastest for KeepAllFlattened).
std::vector<double> preprocess(const Image& image, const PreprocessSpec& spec);

/// One row per item, in collection order.
DataMatrix vectorize(const LabeledCollection& coll, const PreprocessSpec& spec);

/// Rows of `source` named by a MatrixRow collection, in collection order.
DataMatrix vectorize(const LabeledCollection& coll, const DataMatrix& source);

// Raw matrix exchange format: "MPRB", u16 version, u64 n_points, u64 n_dims, then
// n_points * n_dims little-endian f64 values, row-major.
inline constexpr std::uint16_t raw_matrix_version = 1;

DataMatrix read_raw_matrix(const std::filesystem::path& path);
void write_raw_matrix(const DataMatrix& data, const std::filesystem::path& path);

/// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

} // namespace intdim

#endif
