#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "plkit/types.hpp"

namespace plkit {

struct Box {
  CPoint lo;
  CPoint hi;

  double width() const { return hi.real() - lo.real(); }
  double height() const { return hi.imag() - lo.imag(); }
  double diagonal() const { return std::abs(hi - lo); }
  CPoint center() const { return 0.5 * (lo + hi); }
  bool contains(CPoint z) const {
    return z.real() >= lo.real() && z.real() <= hi.real() && z.imag() >= lo.imag() &&
           z.imag() <= hi.imag();
  }
  Box expanded(double margin) const {
    return {lo - CPoint(margin, margin), hi + CPoint(margin, margin)};
  }
  Box united(const Box& o) const;
  bool intersects(const Box& o) const;
  // Smallest square with the same center containing this box.
  Box squared() const;
};

// Closed oriented polyline; the last vertex joins the first.
class JordanCurve {
 public:
  // Validates: >= 8 vertices, no repeated consecutive vertex, simple within
  // geom_eps. Orientation is taken from the signed area.
  explicit JordanCurve(std::vector<CPoint> vertices, double geom_eps_rel = 1e-9);

  static JordanCurve circle(CPoint center, double radius, std::size_t n = 256);
  static JordanCurve ellipse(CPoint center, double semi_re, double semi_im, std::size_t n = 256);

  const std::vector<CPoint>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  CPoint operator[](std::size_t i) const { return vertices_[i]; }
  CPoint next(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

  int orientation() const { return orientation_; }
  double signed_area() const { return signed_area_; }
  const Box& bbox() const { return bbox_; }
  double diameter() const { return bbox_.diagonal(); }
  double geom_eps() const { return geom_eps_; }
  double length() const;
  CPoint centroid() const;

  JordanCurve rotated(std::size_t k) const;
  JordanCurve reversed() const;

 private:
  std::vector<CPoint> vertices_;
  int orientation_ = 1;
  double signed_area_ = 0.0;
  Box bbox_{};
  double geom_eps_ = 0.0;
};

// Uniform bucket grid over polyline segments for proximity queries.
class SegmentIndex {
 public:
  struct Segment {
    CPoint a;
    CPoint b;
    std::uint32_t curve;
    std::uint32_t index;
  };

  explicit SegmentIndex(std::vector<Segment> segments);
  explicit SegmentIndex(const std::vector<const JordanCurve*>& curves);
  explicit SegmentIndex(const JordanCurve& curve)
      : SegmentIndex(std::vector<const JordanCurve*>{&curve}) {}

  // Nearest distance from z to any indexed segment.
  double distance(CPoint z) const;
  // Segments whose bounding box meets `box`.
  void query(const Box& box, std::vector<std::uint32_t>& out) const;
  const Segment& segment(std::uint32_t id) const { return segments_[id]; }
  std::size_t size() const { return segments_.size(); }

 private:
  std::vector<Segment> segments_;
  Box box_{};
  int nx_ = 1;
  int ny_ = 1;
  double cell_ = 1.0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;

  int cx(double x) const;
  int cy(double y) const;
};

double point_segment_distance(CPoint z, CPoint a, CPoint b);
double segment_segment_distance(CPoint a0, CPoint a1, CPoint b0, CPoint b1);
std::optional<CPoint> segment_intersection(CPoint a0, CPoint a1, CPoint b0, CPoint b1);

// Winding number; throws PointOnCurve when z is within geom_eps of the polyline.
int winding_number(const JordanCurve& curve, CPoint z);
// Winding number without the on-curve guard (crossing-number based).
int winding_number_unchecked(const JordanCurve& curve, CPoint z);
bool inside(const JordanCurve& curve, CPoint z);

double distance_to_curve(const JordanCurve& curve, CPoint z);
double curve_distance(const JordanCurve& a, const JordanCurve& b);
double hausdorff_distance(const JordanCurve& a, const JordanCurve& b);
double hausdorff_distance(const std::vector<JordanCurve>& a, const std::vector<JordanCurve>& b);
std::vector<CPoint> intersection_points(const JordanCurve& a, const JordanCurve& b,
                                        std::size_t max_points = 64);
bool is_simple(const std::vector<CPoint>& vertices, double eps);

enum class Nesting { AIntersect, BInside, COutside, DisjointSideBySide };
const char* to_string(Nesting n);

// Relation of curve `a` to curve `b`: BInside means a lies strictly inside b.
Nesting nesting_relation(const JordanCurve& a, const JordanCurve& b);

// Bitmask over a rectangle of the plane. Cell (i, j): column i, row j from the
// bottom edge of the rectangle.
class GridSet {
 public:
  GridSet() = default;
  GridSet(Box rect, int nx, int ny);

  // Square grid of n x n cells centered at `center`.
  static GridSet square(CPoint center, double half_width, int n);
  GridSet empty_like() const { return GridSet(rect_, nx_, ny_); }

  const Box& rect() const { return rect_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell_size() const { return cell_; }
  std::size_t cell_count() const { return cells_.size(); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  bool test(int i, int j) const { return cells_[index(i, j)] != 0; }
  bool test(std::size_t idx) const { return cells_[idx] != 0; }
  void set(int i, int j, bool v = true) { cells_[index(i, j)] = v ? 1 : 0; }
  void set(std::size_t idx, bool v = true) { cells_[idx] = v ? 1 : 0; }

  CPoint center(int i, int j) const;
  CPoint center(std::size_t idx) const {
    return center(static_cast<int>(idx % nx_), static_cast<int>(idx / nx_));
  }
  std::optional<std::pair<int, int>> cell_of(CPoint z) const;
  // True when z falls in an occupied cell.
  bool contains(CPoint z) const;
  // True when z falls within `cells` cells (chessboard) of an occupied cell.
  bool near(CPoint z, int cells) const;

  std::size_t count() const;
  double area() const { return static_cast<double>(count()) * cell_ * cell_; }
  bool empty() const { return count() == 0; }
  bool same_shape(const GridSet& o) const;

  std::vector<std::uint8_t>& raw() { return cells_; }
  const std::vector<std::uint8_t>& raw() const { return cells_; }
  std::vector<std::size_t> occupied() const;

  bool operator==(const GridSet& o) const {
    return same_shape(o) && cells_ == o.cells_;
  }

  GridSet united(const GridSet& o) const;
  GridSet intersected(const GridSet& o) const;
  bool subset_of(const GridSet& o) const;

 private:
  Box rect_{};
  int nx_ = 0;
  int ny_ = 0;
  double cell_ = 0.0;
  std::vector<std::uint8_t> cells_;
};

// Cells not reachable from the rectangle border through empty cells (4-connected).
GridSet topological_hull(const GridSet& s);
// Squared Euclidean distance (in cells) from each cell center to the nearest occupied cell.
std::vector<double> distance_transform_sq(const GridSet& s);
// Cells within Euclidean distance `radius` (cell units) of the set.
GridSet dilate(const GridSet& s, double radius);
// Symmetric Hausdorff distance in cell units; infinity when exactly one is empty.
double hausdorff_cells(const GridSet& a, const GridSet& b);
// 8-connected component labels (0 = empty, 1..count); returns the count.
int label_components(const GridSet& s, std::vector<int>& labels);
std::vector<GridSet> components(const GridSet& s);
GridSet largest_component(const GridSet& s);

// Cells whose centers lie inside any of the curves.
GridSet rasterize_interior(const std::vector<JordanCurve>& curves, const GridSet& shape);
// Cells met by the polylines.
GridSet rasterize_outline(const std::vector<JordanCurve>& curves, const GridSet& shape);
// Cells whose centers lie within `radius` of the polylines.
GridSet rasterize_collar(const std::vector<JordanCurve>& curves, const GridSet& shape, double radius);
// Boundary of a single full 8-connected component traced along cell edges.
JordanCurve outer_boundary(const GridSet& s);

// Range or sub-domain: an open disk or the union of Jordan-curve interiors.
class Region {
 public:
  static Region disk(CPoint center, double radius);
  static Region interior(std::vector<JordanCurve> curves);

  bool is_disk() const { return is_disk_; }
  CPoint center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<JordanCurve>& curves() const { return curves_; }

  bool contains(CPoint z) const;
  double distance_to_boundary(CPoint z) const;
  Box bbox() const { return bbox_; }
  double diameter() const { return bbox_.diagonal() / (is_disk_ ? std::sqrt(2.0) : 1.0); }
  // Boundary as polylines (a disk is sampled with n vertices).
  std::vector<JordanCurve> boundary(std::size_t n = 512) const;

 private:
  bool is_disk_ = true;
  CPoint center_{};
  double radius_ = 0.0;
  std::vector<JordanCurve> curves_;
  Box bbox_{};
  // Acceleration raster for curve regions: 0 outside, 1 inside, 2 boundary.
  GridSet accel_shape_;
  std::vector<std::uint8_t> accel_;
  std::shared_ptr<const SegmentIndex> index_;
};

}  // namespace plkit
