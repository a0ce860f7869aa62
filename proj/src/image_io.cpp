#include "rainlane/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "png_raw.hpp"
#include "rainlane/error.hpp"

namespace rainlane {

namespace detail {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct ErrorSink {
    char message[256] = {};
};

void on_png_error(png_structp png, png_const_charp msg) {
    auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// All libpng calls that may longjmp live in these two functions. Only trivially
// destructible locals exist between setjmp and any longjmp.
bool read_png_c(std::FILE* fp, RawPng* out, std::vector<png_byte>* row, ErrorSink* sink) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink, on_png_error, on_png_warning);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    out->palette = color_type == PNG_COLOR_TYPE_PALETTE;
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
    png_read_update_info(png, info);

    out->width = static_cast<int>(png_get_image_width(png, info));
    out->height = static_cast<int>(png_get_image_height(png, info));
    out->channels = png_get_channels(png, info);
    out->bit_depth = png_get_bit_depth(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    const std::size_t per_row = static_cast<std::size_t>(out->width) * out->channels;
    out->samples.resize(per_row * out->height);
    row->resize(rowbytes);
    for (int y = 0; y < out->height; ++y) {
        png_read_row(png, row->data(), nullptr);
        std::uint16_t* dst = out->samples.data() + per_row * y;
        if (out->bit_depth == 16) {
            std::memcpy(dst, row->data(), per_row * 2);
        } else {
            for (std::size_t i = 0; i < per_row; ++i) dst[i] = (*row)[i];
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool write_png_c(std::FILE* fp, int width, int height, int channels, int bit_depth, const std::uint16_t* samples,
                 png_byte* rowbuf, ErrorSink* sink) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, sink, on_png_error, on_png_warning);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    const std::size_t per_row = static_cast<std::size_t>(width) * channels;
    for (int y = 0; y < height; ++y) {
        const std::uint16_t* src = samples + per_row * y;
        if (bit_depth == 16) {
            std::memcpy(rowbuf, src, per_row * 2);
        } else {
            for (std::size_t i = 0; i < per_row; ++i) rowbuf[i] = static_cast<png_byte>(src[i]);
        }
        png_write_row(png, rowbuf);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

RawPng read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw DataError("cannot open image '" + path.string() + "'");
    unsigned char sig[8] = {};
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw DataError("'" + path.string() + "' is not a PNG file");
    }
    std::rewind(fp.get());
    RawPng raw;
    std::vector<png_byte> row;
    ErrorSink sink;
    if (!read_png_c(fp.get(), &raw, &row, &sink)) {
        throw DataError("cannot decode PNG '" + path.string() + "': " +
                        (sink.message[0] ? sink.message : "libpng initialization failed"));
    }
    return raw;
}

void write_png(const std::filesystem::path& path, int width, int height, int channels, int bit_depth,
               const std::vector<std::uint16_t>& samples) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw DataError("cannot open '" + path.string() + "' for writing");
    std::vector<png_byte> rowbuf(static_cast<std::size_t>(width) * channels * (bit_depth / 8));
    ErrorSink sink;
    if (!write_png_c(fp.get(), width, height, channels, bit_depth, samples.data(), rowbuf.data(), &sink)) {
        throw DataError("cannot encode PNG '" + path.string() + "': " + sink.message);
    }
    if (std::fflush(fp.get()) != 0) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace detail

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// Reads one whitespace/comment separated header token of a netpbm file.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

ImageBuffer load_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image '" + path.string() + "'");
    const std::string magic = pnm_token(in);
    if (magic != "P5" && magic != "P6") {
        throw DataError("unsupported netpbm format '" + magic + "' in '" + path.string() + "'");
    }
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(pnm_token(in));
        height = std::stoi(pnm_token(in));
        maxval = std::stoi(pnm_token(in));
    } catch (const std::exception&) {
        throw DataError("malformed netpbm header in '" + path.string() + "'");
    }
    if (maxval != 255) {
        throw DataError("unsupported bit depth (maxval " + std::to_string(maxval) + ") in '" + path.string() + "'");
    }
    if (width < 1 || height < 1) throw DataError("invalid dimensions in '" + path.string() + "'");
    const int channels = magic == "P6" ? 3 : 1;
    std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw DataError("truncated pixel data in '" + path.string() + "'");
    }
    std::vector<double> data(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = bytes[i] / 255.0;
    return ImageBuffer(width, height, channels, std::move(data));
}

ImageBuffer load_png(const std::filesystem::path& path) {
    detail::RawPng raw = detail::read_png(path);
    if (raw.bit_depth != 8) {
        throw DataError("unsupported bit depth " + std::to_string(raw.bit_depth) + " in '" + path.string() +
                        "' (expected 8-bit)");
    }
    if (raw.palette || (raw.channels != 1 && raw.channels != 3)) {
        throw DataError("unsupported PNG color type in '" + path.string() + "' (expected gray or RGB)");
    }
    std::vector<double> data(raw.samples.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = raw.samples[i] / 255.0;
    return ImageBuffer(raw.width, raw.height, raw.channels, std::move(data));
}

}  // namespace

unsigned char quantize(double v) {
    const double scaled = std::floor(v * 255.0 + 0.5);
    return static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
}

ImageBuffer load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("image file '" + path.string() + "' does not exist");
    const std::string ext = lower_extension(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return load_pnm(path);
    return load_png(path);
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
    if (img.empty()) throw InvalidArgument("cannot save an empty image");
    const std::string ext = lower_extension(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
        out << (img.channels() == 3 ? "P6" : "P5") << "\n" << img.width() << " " << img.height() << "\n255\n";
        std::vector<unsigned char> bytes(img.size());
        for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize(img.data()[i]);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("write failed for '" + path.string() + "'");
        return;
    }
    std::vector<std::uint16_t> samples(img.size());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = quantize(img.data()[i]);
    detail::write_png(path, img.width(), img.height(), img.channels(), 8, samples);
}

}  // namespace rainlane
