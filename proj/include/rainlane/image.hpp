#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rainlane {

struct PixelCoord {
    int row = 0;
    int col = 0;
    bool operator==(const PixelCoord&) const = default;
};

/// Dense height x width x channels raster of intensities, row-major and
/// channel-interleaved. Intensities live on the unit interval; the 0..255
/// scale only exists in the file I/O layer.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, double fill = 0.0);
    /// Takes ownership of `data`; throws InvalidArgument if the size does not
    /// match or a value is not finite.
    ImageBuffer(int width, int height, int channels, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double at(int row, int col, int ch = 0) const { return data_[index(row, col, ch)]; }
    double& at(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    std::size_t index(int row, int col, int ch = 0) const {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
    }

    bool same_shape(const ImageBuffer& other) const {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }
    bool same_dims(const ImageBuffer& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const ImageBuffer&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Real-valued single channel field (distance maps, transmission maps). Unlike
/// ImageBuffer, values are not restricted to the unit interval.
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
};

/// Luma 0.299 R + 0.587 G + 0.114 B. Requires a 3-channel image.
ImageBuffer to_gray(const ImageBuffer& img);

/// Returns `img` if it is single channel, else its luma.
ImageBuffer luma(const ImageBuffer& img);

/// Wraps a ScalarField whose values are already in [0,1] as a 1-channel image.
ImageBuffer field_to_image(const ScalarField& field);

/// Copies the rectangle [row0, row0+height) x [col0, col0+width).
ImageBuffer crop(const ImageBuffer& img, int row0, int col0, int height, int width);

double mean_intensity(const ImageBuffer& img);

}  // namespace rainlane
