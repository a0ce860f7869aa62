#include "rainlane/image.hpp"

#include <cmath>
#include <string>

#include "rainlane/error.hpp"

namespace rainlane {

namespace {

void check_dims(int width, int height, int channels) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    if (channels != 1 && channels != 3) {
        throw InvalidArgument("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height, channels);
    if (!std::isfinite(fill)) throw InvalidArgument("image fill value is not finite");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_dims(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw InvalidArgument("image data length " + std::to_string(data_.size()) + " does not match " +
                              std::to_string(width) + "x" + std::to_string(height) + "x" +
                              std::to_string(channels));
    }
    for (double v : data_) {
        if (!std::isfinite(v)) throw InvalidArgument("image data contains a non-finite value");
    }
}

ImageBuffer to_gray(const ImageBuffer& img) {
    if (img.channels() != 3) {
        throw InvalidArgument("to_gray expects 3 channels, got " + std::to_string(img.channels()));
    }
    ImageBuffer out(img.width(), img.height(), 1);
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        dst[p] = 0.299 * src[3 * p] + 0.587 * src[3 * p + 1] + 0.114 * src[3 * p + 2];
    }
    return out;
}

ImageBuffer luma(const ImageBuffer& img) {
    return img.channels() == 1 ? img : to_gray(img);
}

ImageBuffer field_to_image(const ScalarField& field) {
    return ImageBuffer(field.width, field.height, 1, field.values);
}

ImageBuffer crop(const ImageBuffer& img, int row0, int col0, int height, int width) {
    if (row0 < 0 || col0 < 0 || height < 1 || width < 1 || row0 + height > img.height() ||
        col0 + width > img.width()) {
        throw InvalidArgument("crop rectangle out of bounds");
    }
    ImageBuffer out(width, height, img.channels());
    const int c = img.channels();
    for (int r = 0; r < height; ++r) {
        const double* src = &img.data()[img.index(row0 + r, col0)];
        double* dst = &out.data()[out.index(r, 0)];
        std::copy(src, src + static_cast<std::size_t>(width) * c, dst);
    }
    return out;
}

double mean_intensity(const ImageBuffer& img) {
    double sum = 0.0;
    for (double v : img.data()) sum += v;
    return img.empty() ? 0.0 : sum / static_cast<double>(img.size());
}

}  // namespace rainlane
