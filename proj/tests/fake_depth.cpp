// Usage: fake_depth <image> <depth.png>
// Writes the luma step-function depth of the image as a 16-bit depth PNG.

#include <exception>
#include <iostream>

#include "rainlane/image_io.hpp"
#include "support/depth_oracle.hpp"

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: fake_depth <image> <depth.png>\n";
        return 1;
    }
    try {
        rainlane::save_depth_png(rainlane::testing::oracle_depth(rainlane::load_image(argv[1])), argv[2]);
    } catch (const std::exception& e) {
        std::cerr << "fake_depth: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
