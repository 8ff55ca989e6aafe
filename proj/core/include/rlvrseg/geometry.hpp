#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlvrseg/errors.hpp"

namespace rlvrseg {

struct ImageDims {
  int width = 1;
  int height = 1;

  ImageDims() = default;
  ImageDims(int w, int h);

  std::int64_t pixel_count() const { return std::int64_t(width) * height; }
  bool operator==(const ImageDims&) const = default;
};

// Axis-aligned box given by corner coordinates, origin top-left.
struct BBox {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  BBox() = default;
  BBox(int x1_, int y1_, int x2_, int y2_);

  std::int64_t area() const { return std::int64_t(x2 - x1) * (y2 - y1); }
  bool operator==(const BBox&) const = default;
};

struct Point {
  int x = 0;
  int y = 0;

  bool operator==(const Point&) const = default;
};

// Binary raster, row-major bits packed into 64-bit words.
class Mask {
 public:
  Mask() : dims_(1, 1), words_(1, 0) {}
  explicit Mask(ImageDims dims);

  const ImageDims& dims() const { return dims_; }

  bool get(int x, int y) const {
    std::int64_t i = std::int64_t(y) * dims_.width + x;
    return (words_[std::size_t(i >> 6)] >> (i & 63)) & 1;
  }
  void set(int x, int y, bool v = true) {
    std::int64_t i = std::int64_t(y) * dims_.width + x;
    std::uint64_t bit = std::uint64_t(1) << (i & 63);
    if (v)
      words_[std::size_t(i >> 6)] |= bit;
    else
      words_[std::size_t(i >> 6)] &= ~bit;
  }

  std::int64_t area() const;
  bool empty() const { return area() == 0; }

  bool operator==(const Mask&) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend std::int64_t intersection_area(const Mask& a, const Mask& b);
  friend std::int64_t union_area(const Mask& a, const Mask& b);
  friend Mask mask_union(const std::vector<Mask>& ms);

 private:
  ImageDims dims_;
  std::vector<std::uint64_t> words_;
};

// COCO-style uncompressed RLE: column-major runs, first run counts zeros.
struct RleMask {
  ImageDims dims;
  std::vector<std::int64_t> counts;
};

double mask_iou(const Mask& a, const Mask& b);
std::int64_t intersection_area(const Mask& a, const Mask& b);
std::int64_t union_area(const Mask& a, const Mask& b);

double bbox_iou(const BBox& a, const BBox& b);

// L1 distances; mean over coordinates by default, sum mode optional.
double bbox_l1(const BBox& a, const BBox& b, bool sum_mode = false);
double point_l1(const Point& a, const Point& b, bool sum_mode = false);

Mask mask_union(const std::vector<Mask>& ms);

RleMask rle_encode(const Mask& m);
Mask rle_decode(const RleMask& r);

// Tight bounding box of the set bits; throws EmptyInput on an empty mask.
BBox tight_bbox(const Mask& m);

Mask rasterize(const BBox& box, ImageDims dims);

// P5 binary PGM, maxval 255; set bits written as 255.
std::string mask_to_pgm(const Mask& m);
Mask mask_from_pgm(const std::string& bytes);

}  // namespace rlvrseg
