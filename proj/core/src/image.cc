#include "pmfrank/image.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pmfrank/errors.h"

namespace pmfrank {

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw DomainError("image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw DomainError("pixel count " + std::to_string(pixels_.size()) +
                      " does not match " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  for (double v : pixels_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("pixel intensity outside [0, 1]");
    }
  }
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int parse_header_int(std::istream& in, const std::string& name,
                     const char* field) {
  const std::string token = next_token(in);
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size() || value <= 0) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw ParseError(name, 1, field, "invalid PGM header value '" + token + "'");
  }
}

}  // namespace

GrayImage read_pgm(std::istream& in, const std::string& name) {
  if (next_token(in) != "P5") {
    throw ParseError(name, 1, "magic", "not a binary PGM (P5) file");
  }
  const int width = parse_header_int(in, name, "width");
  const int height = parse_header_int(in, name, "height");
  const int maxval = parse_header_int(in, name, "maxval");
  if (maxval > 255) {
    throw ParseError(name, 1, "maxval", "only 8-bit PGM is supported");
  }
  // next_token consumed exactly one whitespace byte after maxval.
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw ParseError(name, 1, "pixels", "truncated pixel data");
  }
  std::vector<double> pixels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    pixels[i] = std::min(1.0, static_cast<double>(raw[i]) / maxval);
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage read_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image " + path);
  return read_pgm(in, path);
}

void write_pgm(std::ostream& out, const GrayImage& image) {
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (double v : image.pixels()) {
    out.put(static_cast<char>(std::lround(v * 255.0)));
  }
}

}  // namespace pmfrank
