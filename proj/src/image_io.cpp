#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <jpeglib.h>
#include <png.h>

#include "intdim/error.hpp"
#include "intdim/ingest.hpp"

namespace intdim {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void unreadable(const std::filesystem::path& path, const std::string& why) {
    throw Error(ErrorCode::UnreadableImage, path.string() + ": " + why);
}

Image read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        unreadable(path, "cannot open");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        unreadable(path, "libpng initialization failed");
    }
    // State written after setjmp lives behind this pointer.
    struct Decoded {
        Image image;
        std::vector<png_byte> buffer;
        std::vector<png_bytep> rows;
    };
    const auto state = std::make_unique<Decoded>();
    Image* out = &state->image;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        unreadable(path, "corrupt PNG data");
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    out->height = png_get_image_height(png, info);
    out->width = png_get_image_width(png, info);
    out->channels = png_get_channels(png, info);
    const bool wide = png_get_bit_depth(png, info) == 16;
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    state->buffer.resize(row_bytes * out->height);
    state->rows.resize(out->height);
    for (std::size_t y = 0; y < out->height; ++y) {
        state->rows[y] = state->buffer.data() + y * row_bytes;
    }
    png_read_image(png, state->rows.data());
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = out->height * out->width * out->channels;
    out->pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const png_byte* b = state->buffer.data();
        out->pixels[i] = wide ? static_cast<double>((b[2 * i] << 8) | b[2 * i + 1]) / 257.0 : b[i];
    }
    return std::move(*out);
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

Image read_jpeg(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        unreadable(path, "cannot open");
    }
    jpeg_decompress_struct cinfo{};
    JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    // Everything written after setjmp lives behind a pointer that setjmp does not see change.
    struct Decoded {
        std::vector<unsigned char> raw;
        std::size_t height = 0, width = 0, channels = 0;
    };
    const auto out = std::make_unique<Decoded>();
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        unreadable(path, err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    if (cinfo.jpeg_color_space != JCS_GRAYSCALE) {
        cinfo.out_color_space = JCS_RGB;
    }
    jpeg_start_decompress(&cinfo);
    out->height = cinfo.output_height;
    out->width = cinfo.output_width;
    out->channels = static_cast<std::size_t>(cinfo.output_components);
    out->raw.resize(out->height * out->width * out->channels);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out->raw.data() + static_cast<std::size_t>(cinfo.output_scanline) * out->width * out->channels;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return Image{out->height, out->width, out->channels, std::vector<double>(out->raw.begin(), out->raw.end())};
}

// Binary PGM (P5) and PPM (P6), 8- or 16-bit.
Image read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    in >> magic;
    auto next_int = [&]() -> std::size_t {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string comment;
            std::getline(in, comment);
            in >> std::ws;
        }
        std::size_t v = 0;
        if (!(in >> v)) {
            unreadable(path, "bad PNM header");
        }
        return v;
    };
    const std::size_t channels = magic == "P5" ? 1 : magic == "P6" ? 3 : 0;
    if (channels == 0) {
        unreadable(path, "only binary PGM (P5) and PPM (P6) are supported");
    }
    const std::size_t width = next_int();
    const std::size_t height = next_int();
    const std::size_t maxval = next_int();
    in.get();
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
        unreadable(path, "bad PNM dimensions");
    }
    const std::size_t n = width * height * channels;
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes_per);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
        unreadable(path, "truncated PNM data");
    }
    Image img{height, width, channels, std::vector<double>(n)};
    const double scale = 255.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = bytes_per == 2 ? static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
        img.pixels[i] = maxval == 255 ? v : v * scale;
    }
    return img;
}

} // namespace

Image read_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        unreadable(path, "cannot open");
    }
    unsigned char sig[8] = {};
    probe.read(reinterpret_cast<char*>(sig), sizeof sig);
    if (probe.gcount() >= 8 && png_sig_cmp(sig, 0, 8) == 0) {
        return read_png(path);
    }
    if (probe.gcount() >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) {
        return read_jpeg(path);
    }
    if (probe.gcount() >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) {
        return read_pnm(path);
    }
    unreadable(path, "unrecognized image format");
}

} // namespace intdim
