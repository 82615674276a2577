#include "intdim/ingest.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "intdim/error.hpp"
#include "intdim/random.hpp"

namespace intdim {

namespace {

std::string manifest_error(std::size_t line, const std::string& what) {
    return "manifest line " + std::to_string(line) + ": " + what;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<std::size_t> parse_index(std::string_view s) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return value;
}

// Partial Fisher-Yates: the first `count` entries become a uniform draw without replacement.
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t count, Rng& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
}

} // namespace

LabeledCollection::LabeledCollection(std::vector<LabeledItem> items, SourceKind kind, std::filesystem::path base_dir,
                                     std::string name)
    : items_(std::move(items)), kind_(kind), base_dir_(std::move(base_dir)), name_(std::move(name)) {
    std::unordered_set<std::string_view> seen;
    for (const auto& item : items_) {
        if (item.label != 0 && item.label != 1) {
            throw Error(ErrorCode::MalformedManifest, "label of '" + item.source_ref + "' is not binary");
        }
        if (!seen.insert(item.source_ref).second) {
            throw Error(ErrorCode::MalformedManifest, "duplicate source '" + item.source_ref + "'");
        }
    }
}

std::array<std::size_t, 2> LabeledCollection::label_counts() const noexcept {
    std::array<std::size_t, 2> counts{0, 0};
    for (const auto& item : items_) {
        ++counts[static_cast<std::size_t>(item.label)];
    }
    return counts;
}

std::filesystem::path LabeledCollection::resolve(std::size_t i) const {
    std::filesystem::path p(items_.at(i).source_ref);
    return p.is_absolute() ? p : base_dir_ / p;
}

std::size_t LabeledCollection::row_index(std::size_t i) const {
    const auto& ref = items_.at(i).source_ref;
    const auto idx = parse_index(ref);
    if (!idx) {
        throw Error(ErrorCode::MalformedManifest, "'" + ref + "' is not a row index");
    }
    return *idx;
}

LabeledCollection LabeledCollection::with_items(std::vector<LabeledItem> items) const {
    return LabeledCollection(std::move(items), kind_, base_dir_, name_);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

LabeledCollection parse_labels(std::string_view text, SourceKind kind, std::filesystem::path base_dir,
                               std::string name) {
    std::vector<LabeledItem> items;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!header_seen) {
            const auto fields = split_csv_line(line);
            if (fields.size() != 2 || trim(fields[0]) != "path" || trim(fields[1]) != "label") {
                throw Error(ErrorCode::MalformedManifest, manifest_error(line_no, "expected header 'path,label'"));
            }
            header_seen = true;
            continue;
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw Error(ErrorCode::MalformedManifest, manifest_error(line_no, "expected 2 fields"));
        }
        const std::string source(trim(fields[0]));
        const std::string_view label = trim(fields[1]);
        if (source.empty()) {
            throw Error(ErrorCode::MalformedManifest, manifest_error(line_no, "empty path"));
        }
        if (label != "0" && label != "1") {
            throw Error(ErrorCode::MalformedManifest,
                        manifest_error(line_no, "label '" + std::string(label) + "' is not 0 or 1"));
        }
        if (kind == SourceKind::MatrixRow && !parse_index(source)) {
            throw Error(ErrorCode::MalformedManifest, manifest_error(line_no, "'" + source + "' is not a row index"));
        }
        if (!seen.insert(source).second) {
            throw Error(ErrorCode::MalformedManifest, manifest_error(line_no, "duplicate path '" + source + "'"));
        }
        items.push_back({source, label == "1" ? 1 : 0});
    }
    if (!header_seen) {
        throw Error(ErrorCode::MalformedManifest, manifest_error(1, "missing header 'path,label'"));
    }
    return LabeledCollection(std::move(items), kind, std::move(base_dir), std::move(name));
}

LabeledCollection load_labels(const std::filesystem::path& manifest, SourceKind kind) {
    std::ifstream in(manifest, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open manifest " + manifest.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_labels(buffer.str(), kind, manifest.parent_path(), manifest.filename().string());
}

LabeledCollection stratified_sample(const LabeledCollection& coll, std::size_t total, std::uint64_t seed) {
    if (total % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "balanced sample size must be even, got " + std::to_string(total));
    }
    const std::size_t per_class = total / 2;
    std::array<std::vector<std::size_t>, 2> pools;
    for (std::size_t i = 0; i < coll.size(); ++i) {
        pools[static_cast<std::size_t>(coll.items()[i].label)].push_back(i);
    }
    for (int label = 0; label < 2; ++label) {
        const auto available = pools[static_cast<std::size_t>(label)].size();
        if (available < per_class) {
            throw Error(ErrorCode::InsufficientClass, "class " + std::to_string(label) + " has " +
                                                          std::to_string(available) + " items, " +
                                                          std::to_string(per_class) + " needed");
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(total);
    for (auto& pool : pools) {
        partial_shuffle(pool, per_class, rng);
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(per_class));
    }
    partial_shuffle(chosen, chosen.size(), rng);

    std::vector<LabeledItem> items;
    items.reserve(total);
    for (std::size_t idx : chosen) {
        items.push_back(coll.items()[idx]);
    }
    return coll.with_items(std::move(items));
}

LabeledCollection uniform_sample(const LabeledCollection& coll, std::size_t total, std::uint64_t seed) {
    if (total > coll.size()) {
        throw Error(ErrorCode::InvalidArgument, "sample of " + std::to_string(total) + " requested from " +
                                                    std::to_string(coll.size()) + " items");
    }
    std::vector<std::size_t> pool(coll.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pool[i] = i;
    }
    Rng rng(seed);
    partial_shuffle(pool, total, rng);
    std::vector<LabeledItem> items;
    items.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        items.push_back(coll.items()[pool[i]]);
    }
    return coll.with_items(std::move(items));
}

std::string_view channel_policy_name(ChannelPolicy policy) noexcept {
    switch (policy) {
    case ChannelPolicy::GrayscaleAverage: return "grayscale_average";
    case ChannelPolicy::FirstChannel: return "first_channel";
    case ChannelPolicy::KeepAllFlattened: return "keep_all_flattened";
    }
    return "unknown";
}

std::optional<ChannelPolicy> parse_channel_policy(std::string_view name) noexcept {
    for (auto p : {ChannelPolicy::GrayscaleAverage, ChannelPolicy::FirstChannel, ChannelPolicy::KeepAllFlattened}) {
        if (channel_policy_name(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

Image resize_bilinear(const Image& image, std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) {
        throw Error(ErrorCode::InvalidArgument, "target resolution must be at least 1x1");
    }
    if (image.height == height && image.width == width) {
        return image;
    }
    Image out{height, width, image.channels, std::vector<double>(height * width * image.channels)};
    const double sy = static_cast<double>(image.height) / static_cast<double>(height);
    const double sx = static_cast<double>(image.width) / static_cast<double>(width);

    struct Tap {
        std::size_t lo, hi;
        double frac;
    };
    auto taps = [](std::size_t n_out, std::size_t n_in, double scale) {
        std::vector<Tap> t(n_out);
        for (std::size_t o = 0; o < n_out; ++o) {
            double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
            src = std::clamp(src, 0.0, static_cast<double>(n_in - 1));
            const auto lo = static_cast<std::size_t>(src);
            const std::size_t hi = std::min(lo + 1, n_in - 1);
            t[o] = {lo, hi, src - static_cast<double>(lo)};
        }
        return t;
    };
    const auto ty = taps(height, image.height, sy);
    const auto tx = taps(width, image.width, sx);
    const std::size_t c = image.channels;
    auto at = [&](std::size_t y, std::size_t x, std::size_t ch) { return image.pixels[(y * image.width + x) * c + ch]; };
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                const double top = at(ty[y].lo, tx[x].lo, ch) * (1.0 - tx[x].frac) + at(ty[y].lo, tx[x].hi, ch) * tx[x].frac;
                const double bot = at(ty[y].hi, tx[x].lo, ch) * (1.0 - tx[x].frac) + at(ty[y].hi, tx[x].hi, ch) * tx[x].frac;
                out.pixels[(y * width + x) * c + ch] = top * (1.0 - ty[y].frac) + bot * ty[y].frac;
            }
        }
    }
    return out;
}

std::vector<double> preprocess(const Image& image, const PreprocessSpec& spec) {
    const Image resized = resize_bilinear(image, spec.height, spec.width);
    const std::size_t n_pixels = spec.height * spec.width;
    const std::size_t c = resized.channels;
    if (spec.channels == ChannelPolicy::KeepAllFlattened || c == 1) {
        return resized.pixels;
    }
    std::vector<double> out(n_pixels);
    for (std::size_t p = 0; p < n_pixels; ++p) {
        if (spec.channels == ChannelPolicy::FirstChannel) {
            out[p] = resized.pixels[p * c];
        } else {
            double sum = 0.0;
            for (std::size_t ch = 0; ch < c; ++ch) {
                sum += resized.pixels[p * c + ch];
            }
            out[p] = sum / static_cast<double>(c);
        }
    }
    return out;
}

DataMatrix vectorize(const LabeledCollection& coll, const PreprocessSpec& spec) {
    if (coll.source_kind() != SourceKind::ImagePath) {
        throw Error(ErrorCode::InvalidArgument, "collection refers to matrix rows; vectorize it against a matrix");
    }
    if (coll.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "cannot vectorize an empty collection");
    }
    std::vector<double> values;
    std::size_t row_len = 0;
    for (std::size_t i = 0; i < coll.size(); ++i) {
        const auto row = preprocess(read_image(coll.resolve(i)), spec);
        if (i == 0) {
            row_len = row.size();
            values.reserve(row_len * coll.size());
        } else if (row.size() != row_len) {
            throw Error(ErrorCode::InconsistentDims, "image '" + coll.items()[i].source_ref + "' yields " +
                                                         std::to_string(row.size()) + " values, expected " +
                                                         std::to_string(row_len));
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    return DataMatrix(coll.size(), row_len, std::move(values));
}

DataMatrix vectorize(const LabeledCollection& coll, const DataMatrix& source) {
    if (coll.source_kind() != SourceKind::MatrixRow) {
        throw Error(ErrorCode::InvalidArgument, "collection refers to image files, not matrix rows");
    }
    if (coll.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "cannot vectorize an empty collection");
    }
    const std::size_t d = source.n_dims();
    auto out = DataMatrix::zeros(coll.size(), d);
    for (std::size_t i = 0; i < coll.size(); ++i) {
        const std::size_t r = coll.row_index(i);
        if (r >= source.n_points()) {
            throw Error(ErrorCode::InconsistentDims, "row " + std::to_string(r) + " is out of range for a matrix with " +
                                                         std::to_string(source.n_points()) + " rows");
        }
        const auto src = source.row(r);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

namespace {

constexpr char raw_magic[4] = {'M', 'P', 'R', 'B'};
constexpr std::size_t raw_header_bytes = 4 + 2 + 8 + 8;

template <typename T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        bytes[b] = static_cast<unsigned char>(value >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const unsigned char* bytes) {
    T value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        value |= static_cast<T>(bytes[b]) << (8 * b);
    }
    return value;
}

} // namespace

DataMatrix read_raw_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open matrix " + path.string());
    }
    unsigned char header[raw_header_bytes];
    if (!in.read(reinterpret_cast<char*>(header), raw_header_bytes)) {
        throw Error(ErrorCode::InconsistentDims, path.string() + ": truncated header");
    }
    if (std::memcmp(header, raw_magic, 4) != 0) {
        throw Error(ErrorCode::InconsistentDims, path.string() + ": bad magic, expected MPRB");
    }
    const auto version = get_le<std::uint16_t>(header + 4);
    if (version != raw_matrix_version) {
        throw Error(ErrorCode::InconsistentDims, path.string() + ": unsupported version " + std::to_string(version));
    }
    const auto n = get_le<std::uint64_t>(header + 6);
    const auto d = get_le<std::uint64_t>(header + 14);
    const auto file_size = std::filesystem::file_size(path);
    if (n == 0 || d == 0 || d > (file_size / 8) / n || raw_header_bytes + n * d * 8 != file_size) {
        throw Error(ErrorCode::InconsistentDims, path.string() + ": header declares " + std::to_string(n) + " x " +
                                                     std::to_string(d) + " but the file holds " +
                                                     std::to_string(file_size) + " bytes");
    }
    auto out = DataMatrix::zeros(n, d);
    auto values = out.values();
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) {
        throw Error(ErrorCode::Io, path.string() + ": short read");
    }
    if constexpr (std::endian::native == std::endian::big) {
        for (double& v : values) {
            v = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(v)));
        }
    }
    out.validate();
    return out;
}

void write_raw_matrix(const DataMatrix& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write matrix " + path.string());
    }
    out.write(raw_magic, 4);
    put_le<std::uint16_t>(out, raw_matrix_version);
    put_le<std::uint64_t>(out, data.n_points());
    put_le<std::uint64_t>(out, data.n_dims());
    if constexpr (std::endian::native == std::endian::little) {
        const auto values = data.values();
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
    } else {
        for (double v : data.values()) {
            put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing matrix " + path.string());
    }
}

} // namespace intdim
