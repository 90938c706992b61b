#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pmfrank {

// Row-major grayscale image with intensities in [0, 1].
class GrayImage {
 public:
  // Throws DomainError if dimensions are not positive, the pixel count does
  // not match, or any intensity lies outside [0, 1].
  GrayImage(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  double at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  const std::vector<double>& pixels() const { return pixels_; }

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

// Binary 8-bit PGM (P5). Intensities are scaled by 1/maxval.
GrayImage read_pgm(std::istream& in, const std::string& name = "<stream>");
GrayImage read_pgm_file(const std::string& path);
void write_pgm(std::ostream& out, const GrayImage& image);

}  // namespace pmfrank
