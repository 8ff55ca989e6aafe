#include "rlvrseg/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>

namespace rlvrseg {

namespace {

void require_same_dims(const ImageDims& a, const ImageDims& b) {
  if (!(a == b)) {
    throw DimsMismatch("mask dims mismatch: " + std::to_string(a.width) + "x" +
                       std::to_string(a.height) + " vs " +
                       std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

}  // namespace

ImageDims::ImageDims(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw Error("ImageDims must be at least 1x1");
  }
}

BBox::BBox(int x1_, int y1_, int x2_, int y2_) : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
  if (x1 > x2 || y1 > y2) {
    throw Error("BBox corners out of order");
  }
}

Mask::Mask(ImageDims dims)
    : dims_(dims), words_(std::size_t((dims.pixel_count() + 63) / 64), 0) {}

std::int64_t Mask::area() const {
  std::int64_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::int64_t intersection_area(const Mask& a, const Mask& b) {
  require_same_dims(a.dims_, b.dims_);
  std::int64_t n = 0;
  for (std::size_t i = 0; i < a.words_.size(); ++i)
    n += std::popcount(a.words_[i] & b.words_[i]);
  return n;
}

std::int64_t union_area(const Mask& a, const Mask& b) {
  require_same_dims(a.dims_, b.dims_);
  std::int64_t n = 0;
  for (std::size_t i = 0; i < a.words_.size(); ++i)
    n += std::popcount(a.words_[i] | b.words_[i]);
  return n;
}

double mask_iou(const Mask& a, const Mask& b) {
  std::int64_t u = union_area(a, b);
  if (u == 0) return 1.0;  // both empty: perfect agreement by convention
  return double(intersection_area(a, b)) / double(u);
}

double bbox_iou(const BBox& a, const BBox& b) {
  if (a == b && a.area() == 0) return 1.0;
  std::int64_t ix = std::max<std::int64_t>(
      0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  std::int64_t iy = std::max<std::int64_t>(
      0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  std::int64_t inter = ix * iy;
  std::int64_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return double(inter) / double(uni);
}

double bbox_l1(const BBox& a, const BBox& b, bool sum_mode) {
  double s = std::abs(a.x1 - b.x1) + std::abs(a.y1 - b.y1) +
             std::abs(a.x2 - b.x2) + std::abs(a.y2 - b.y2);
  return sum_mode ? s : s / 4.0;
}

double point_l1(const Point& a, const Point& b, bool sum_mode) {
  double s = std::abs(a.x - b.x) + std::abs(a.y - b.y);
  return sum_mode ? s : s / 2.0;
}

Mask mask_union(const std::vector<Mask>& ms) {
  if (ms.empty()) throw EmptyInput("mask_union of empty list");
  Mask out = ms.front();
  for (std::size_t k = 1; k < ms.size(); ++k) {
    require_same_dims(out.dims_, ms[k].dims_);
    for (std::size_t i = 0; i < out.words_.size(); ++i)
      out.words_[i] |= ms[k].words_[i];
  }
  return out;
}

RleMask rle_encode(const Mask& m) {
  RleMask r;
  r.dims = m.dims();
  bool cur = false;  // canonical form starts with a zero-run, possibly empty
  std::int64_t run = 0;
  for (int x = 0; x < r.dims.width; ++x) {
    for (int y = 0; y < r.dims.height; ++y) {
      bool v = m.get(x, y);
      if (v == cur) {
        ++run;
      } else {
        r.counts.push_back(run);
        cur = v;
        run = 1;
      }
    }
  }
  r.counts.push_back(run);
  return r;
}

Mask rle_decode(const RleMask& r) {
  std::int64_t total = 0;
  for (std::int64_t c : r.counts) {
    if (c < 0) throw CorruptRle("negative run length");
    total += c;
  }
  if (total != r.dims.pixel_count()) {
    throw CorruptRle("run lengths sum to " + std::to_string(total) +
                     ", expected " + std::to_string(r.dims.pixel_count()));
  }
  Mask m(r.dims);
  std::int64_t pos = 0;
  bool cur = false;
  for (std::int64_t c : r.counts) {
    if (cur) {
      for (std::int64_t i = pos; i < pos + c; ++i) {
        int x = int(i / r.dims.height);
        int y = int(i % r.dims.height);
        m.set(x, y);
      }
    }
    pos += c;
    cur = !cur;
  }
  return m;
}

BBox tight_bbox(const Mask& m) {
  int x_min = m.dims().width, y_min = m.dims().height, x_max = -1, y_max = -1;
  for (int y = 0; y < m.dims().height; ++y) {
    for (int x = 0; x < m.dims().width; ++x) {
      if (m.get(x, y)) {
        x_min = std::min(x_min, x);
        y_min = std::min(y_min, y);
        x_max = std::max(x_max, x);
        y_max = std::max(y_max, y);
      }
    }
  }
  if (x_max < 0) throw EmptyInput("tight_bbox of empty mask");
  return BBox(x_min, y_min, x_max + 1, y_max + 1);
}

Mask rasterize(const BBox& box, ImageDims dims) {
  Mask m(dims);
  int x1 = std::clamp(box.x1, 0, dims.width);
  int x2 = std::clamp(box.x2, 0, dims.width);
  int y1 = std::clamp(box.y1, 0, dims.height);
  int y2 = std::clamp(box.y2, 0, dims.height);
  for (int y = y1; y < y2; ++y)
    for (int x = x1; x < x2; ++x) m.set(x, y);
  return m;
}

std::string mask_to_pgm(const Mask& m) {
  std::ostringstream os;
  os << "P5\n" << m.dims().width << " " << m.dims().height << "\n255\n";
  for (int y = 0; y < m.dims().height; ++y)
    for (int x = 0; x < m.dims().width; ++x)
      os.put(m.get(x, y) ? char(255) : char(0));
  return os.str();
}

Mask mask_from_pgm(const std::string& bytes) {
  std::istringstream is(bytes);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw InputError("not a P5 PGM");
  int w = 0, h = 0, maxval = 0;
  is >> w >> h >> maxval;
  if (!is || w < 1 || h < 1 || maxval != 255) throw InputError("bad PGM header");
  is.get();  // single whitespace after maxval
  Mask m(ImageDims(w, h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int c = is.get();
      if (c == EOF) throw InputError("truncated PGM payload");
      if (c != 0) m.set(x, y);
    }
  }
  return m;
}

}  // namespace rlvrseg
