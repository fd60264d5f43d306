#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "plkit/geometry.hpp"

namespace plkit {

namespace {

double cross(CPoint a, CPoint b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(CPoint a, CPoint b) { return a.real() * b.real() + a.imag() * b.imag(); }

Box segment_box(CPoint a, CPoint b) {
  return {{std::min(a.real(), b.real()), std::min(a.imag(), b.imag())},
          {std::max(a.real(), b.real()), std::max(a.imag(), b.imag())}};
}

Box vertex_box(const std::vector<CPoint>& v) {
  Box b{v.front(), v.front()};
  for (CPoint z : v) {
    b.lo = {std::min(b.lo.real(), z.real()), std::min(b.lo.imag(), z.imag())};
    b.hi = {std::max(b.hi.real(), z.real()), std::max(b.hi.imag(), z.imag())};
  }
  return b;
}

std::vector<SegmentIndex::Segment> closed_segments(const std::vector<CPoint>& v, std::uint32_t curve) {
  std::vector<SegmentIndex::Segment> segs;
  segs.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    segs.push_back({v[i], v[(i + 1) % v.size()], curve, static_cast<std::uint32_t>(i)});
  }
  return segs;
}

}  // namespace

Box Box::united(const Box& o) const {
  return {{std::min(lo.real(), o.lo.real()), std::min(lo.imag(), o.lo.imag())},
          {std::max(hi.real(), o.hi.real()), std::max(hi.imag(), o.hi.imag())}};
}

bool Box::intersects(const Box& o) const {
  return lo.real() <= o.hi.real() && o.lo.real() <= hi.real() && lo.imag() <= o.hi.imag() &&
         o.lo.imag() <= hi.imag();
}

Box Box::squared() const {
  const double half = 0.5 * std::max(width(), height());
  const CPoint c = center();
  return {c - CPoint(half, half), c + CPoint(half, half)};
}

// ---------------------------------------------------------------------------
// Segment primitives

double point_segment_distance(CPoint z, CPoint a, CPoint b) {
  const CPoint ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(dot(z - a, ab) / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

std::optional<CPoint> segment_intersection(CPoint a0, CPoint a1, CPoint b0, CPoint b1) {
  const CPoint r = a1 - a0;
  const CPoint s = b1 - b0;
  const double denom = cross(r, s);
  const CPoint qp = b0 - a0;
  if (denom == 0.0) {
    // Parallel: report an overlap point for collinear overlapping segments.
    if (cross(qp, r) != 0.0) return std::nullopt;
    const double rr = std::norm(r);
    if (rr == 0.0) return std::nullopt;
    const double t0 = dot(qp, r) / rr;
    const double t1 = t0 + dot(s, r) / rr;
    const double lo = std::max(0.0, std::min(t0, t1));
    const double hi = std::min(1.0, std::max(t0, t1));
    if (lo > hi) return std::nullopt;
    return a0 + lo * r;
  }
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return a0 + t * r;
}

double segment_segment_distance(CPoint a0, CPoint a1, CPoint b0, CPoint b1) {
  if (segment_intersection(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

// ---------------------------------------------------------------------------
// SegmentIndex

SegmentIndex::SegmentIndex(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) {
    offsets_.assign(2, 0);
    return;
  }
  box_ = segment_box(segments_[0].a, segments_[0].b);
  double total = 0.0;
  for (const auto& s : segments_) {
    box_ = box_.united(segment_box(s.a, s.b));
    total += std::abs(s.b - s.a);
  }
  const double mean_len = total / static_cast<double>(segments_.size());
  const double extent = std::max({box_.width(), box_.height(), 1e-300});
  cell_ = std::max({2.0 * mean_len, extent / 2048.0, 1e-300});
  nx_ = std::max(1, std::min(4096, static_cast<int>(std::ceil(box_.width() / cell_)) + 1));
  ny_ = std::max(1, std::min(4096, static_cast<int>(std::ceil(box_.height() / cell_)) + 1));
  cell_ = std::max(cell_, std::max(box_.width() / (nx_ - 0.5), box_.height() / (ny_ - 0.5)));

  std::vector<std::uint32_t> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  auto for_cells = [&](const Segment& s, auto&& fn) {
    const Box b = segment_box(s.a, s.b);
    const int i0 = cx(b.lo.real()), i1 = cx(b.hi.real());
    const int j0 = cy(b.lo.imag()), j1 = cy(b.hi.imag());
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) fn(static_cast<std::size_t>(j) * nx_ + i);
  };
  for (const auto& s : segments_) for_cells(s, [&](std::size_t c) { ++counts[c + 1]; });
  for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
  offsets_ = counts;
  items_.resize(offsets_.back());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t id = 0; id < segments_.size(); ++id)
    for_cells(segments_[id], [&](std::size_t c) { items_[fill[c]++] = id; });
}

SegmentIndex::SegmentIndex(const std::vector<const JordanCurve*>& curves)
    : SegmentIndex([&] {
        std::vector<Segment> segs;
        for (std::uint32_t k = 0; k < curves.size(); ++k) {
          auto s = closed_segments(curves[k]->vertices(), k);
          segs.insert(segs.end(), s.begin(), s.end());
        }
        return segs;
      }()) {}

int SegmentIndex::cx(double x) const {
  return std::clamp(static_cast<int>(std::floor((x - box_.lo.real()) / cell_)), 0, nx_ - 1);
}
int SegmentIndex::cy(double y) const {
  return std::clamp(static_cast<int>(std::floor((y - box_.lo.imag()) / cell_)), 0, ny_ - 1);
}

void SegmentIndex::query(const Box& box, std::vector<std::uint32_t>& out) const {
  out.clear();
  if (segments_.empty() || !box.intersects(box_)) return;
  const int i0 = cx(box.lo.real()), i1 = cx(box.hi.real());
  const int j0 = cy(box.lo.imag()), j1 = cy(box.hi.imag());
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
      for (std::uint32_t k = offsets_[c]; k < offsets_[c + 1]; ++k) out.push_back(items_[k]);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

double SegmentIndex::distance(CPoint z) const {
  double best = std::numeric_limits<double>::infinity();
  if (segments_.empty()) return best;
  const CPoint zc(std::clamp(z.real(), box_.lo.real(), box_.hi.real()),
                  std::clamp(z.imag(), box_.lo.imag(), box_.hi.imag()));
  // Projection onto the box: |z - p|^2 >= |z - zc|^2 + |zc - p|^2 for p in the box.
  const double dbox2 = std::norm(z - zc);
  const int ci = cx(zc.real()), cj = cy(zc.imag());
  const int rmax = std::max(nx_, ny_);
  auto visit = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return;
    const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
    for (std::uint32_t k = offsets_[c]; k < offsets_[c + 1]; ++k) {
      const auto& s = segments_[items_[k]];
      best = std::min(best, point_segment_distance(z, s.a, s.b));
    }
  };
  for (int r = 0; r <= rmax; ++r) {
    if (r == 0) {
      visit(ci, cj);
    } else {
      for (int i = ci - r; i <= ci + r; ++i) {
        visit(i, cj - r);
        visit(i, cj + r);
      }
      for (int j = cj - r + 1; j <= cj + r - 1; ++j) {
        visit(ci - r, j);
        visit(ci + r, j);
      }
    }
    const double reach = r * cell_;
    if (best * best <= dbox2 + reach * reach) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// JordanCurve

bool is_simple(const std::vector<CPoint>& v, double eps) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  SegmentIndex index(closed_segments(v, 0));
  std::vector<std::uint32_t> hits;
  for (std::size_t i = 0; i < n; ++i) {
    const CPoint a = v[i], b = v[(i + 1) % n];
    // Fold-back onto the neighbouring segment.
    const CPoint c = v[(i + 2) % n];
    if (point_segment_distance(a, b, c) <= eps || point_segment_distance(c, a, b) <= eps) return false;
    index.query(segment_box(a, b).expanded(eps), hits);
    for (std::uint32_t k : hits) {
      if (k <= i) continue;
      const std::size_t diff = k - i;
      if (diff == 1 || diff == n - 1) continue;
      const auto& s = index.segment(k);
      if (segment_segment_distance(a, b, s.a, s.b) <= eps) return false;
    }
  }
  return true;
}

JordanCurve::JordanCurve(std::vector<CPoint> vertices, double geom_eps_rel)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 8) {
    throw Error(ErrorCode::InvalidArgument, "JordanCurve needs at least 8 vertices");
  }
  for (CPoint z : vertices_) {
    if (!is_finite(z)) throw Error(ErrorCode::InvalidArgument, "JordanCurve vertex not finite");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i] == next(i)) {
      throw Error(ErrorCode::InvalidArgument, "JordanCurve has repeated consecutive vertices");
    }
  }
  bbox_ = vertex_box(vertices_);
  geom_eps_ = geom_eps_rel * bbox_.diagonal();
  double area2 = 0.0;
  const CPoint origin = vertices_.front();
  for (std::size_t i = 0; i < vertices_.size(); ++i) area2 += cross(vertices_[i] - origin, next(i) - origin);
  signed_area_ = 0.5 * area2;
  if (signed_area_ == 0.0) throw Error(ErrorCode::InvalidArgument, "JordanCurve has zero area");
  orientation_ = signed_area_ > 0 ? 1 : -1;
  if (!is_simple(vertices_, geom_eps_)) {
    throw Error(ErrorCode::InvalidArgument, "JordanCurve is not simple");
  }
}

JordanCurve JordanCurve::circle(CPoint center, double radius, std::size_t n) {
  return ellipse(center, radius, radius, n);
}

JordanCurve JordanCurve::ellipse(CPoint center, double semi_re, double semi_im, std::size_t n) {
  std::vector<CPoint> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    v[k] = center + CPoint(semi_re * std::cos(t), semi_im * std::sin(t));
  }
  return JordanCurve(std::move(v));
}

double JordanCurve::length() const {
  double len = 0.0;
  for (std::size_t i = 0; i < size(); ++i) len += std::abs(next(i) - vertices_[i]);
  return len;
}

CPoint JordanCurve::centroid() const {
  // Area centroid of the enclosed polygon.
  CPoint acc{};
  double a2 = 0.0;
  const CPoint o = vertices_.front();
  for (std::size_t i = 0; i < size(); ++i) {
    const CPoint p = vertices_[i] - o, q = next(i) - o;
    const double c = cross(p, q);
    acc += c * (p + q);
    a2 += c;
  }
  return o + acc / (3.0 * a2);
}

JordanCurve JordanCurve::rotated(std::size_t k) const {
  std::vector<CPoint> v(vertices_);
  std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k % v.size()), v.end());
  return JordanCurve(std::move(v));
}

JordanCurve JordanCurve::reversed() const {
  std::vector<CPoint> v(vertices_.rbegin(), vertices_.rend());
  return JordanCurve(std::move(v));
}

// ---------------------------------------------------------------------------
// Predicates

int winding_number_unchecked(const JordanCurve& curve, CPoint z) {
  int wn = 0;
  const auto& v = curve.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const CPoint a = v[i], b = v[(i + 1) % n];
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && cross(b - a, z - a) > 0) ++wn;
    } else {
      if (b.imag() <= z.imag() && cross(b - a, z - a) < 0) --wn;
    }
  }
  return wn;
}

double distance_to_curve(const JordanCurve& curve, CPoint z) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.size(); ++i)
    best = std::min(best, point_segment_distance(z, curve[i], curve.next(i)));
  return best;
}

int winding_number(const JordanCurve& curve, CPoint z) {
  if (distance_to_curve(curve, z) <= curve.geom_eps()) {
    throw Error(ErrorCode::PointOnCurve, "point lies on the curve");
  }
  return winding_number_unchecked(curve, z);
}

bool inside(const JordanCurve& curve, CPoint z) { return winding_number_unchecked(curve, z) != 0; }

namespace {

// Calls fn(point) for crossings of a and b; stops when fn returns false.
template <class Fn>
void for_each_crossing(const JordanCurve& a, const JordanCurve& b, double eps, Fn&& fn) {
  if (!a.bbox().expanded(eps).intersects(b.bbox())) return;
  SegmentIndex index(b);
  std::vector<std::uint32_t> hits;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const CPoint p = a[i], q = a.next(i);
    index.query(segment_box(p, q).expanded(eps), hits);
    for (std::uint32_t k : hits) {
      const auto& s = index.segment(k);
      if (auto x = segment_intersection(p, q, s.a, s.b)) {
        if (!fn(*x)) return;
      } else if (eps > 0 && segment_segment_distance(p, q, s.a, s.b) <= eps) {
        if (!fn(p)) return;
      }
    }
  }
}

}  // namespace

double curve_distance(const JordanCurve& a, const JordanCurve& b) {
  bool crossing = false;
  for_each_crossing(a, b, 0.0, [&](CPoint) {
    crossing = true;
    return false;
  });
  if (crossing) return 0.0;
  SegmentIndex ia(a), ib(b);
  double best = std::numeric_limits<double>::infinity();
  for (CPoint z : a.vertices()) best = std::min(best, ib.distance(z));
  for (CPoint z : b.vertices()) best = std::min(best, ia.distance(z));
  return best;
}

double hausdorff_distance(const JordanCurve& a, const JordanCurve& b) {
  return hausdorff_distance(std::vector<JordanCurve>{a}, std::vector<JordanCurve>{b});
}

double hausdorff_distance(const std::vector<JordanCurve>& a, const std::vector<JordanCurve>& b) {
  if (a.empty() || b.empty()) {
    return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  }
  std::vector<const JordanCurve*> pa, pb;
  for (const auto& c : a) pa.push_back(&c);
  for (const auto& c : b) pb.push_back(&c);
  SegmentIndex ia(pa), ib(pb);
  double h = 0.0;
  for (const auto& c : a)
    for (CPoint z : c.vertices()) h = std::max(h, ib.distance(z));
  for (const auto& c : b)
    for (CPoint z : c.vertices()) h = std::max(h, ia.distance(z));
  return h;
}

std::vector<CPoint> intersection_points(const JordanCurve& a, const JordanCurve& b,
                                        std::size_t max_points) {
  std::vector<CPoint> pts;
  for_each_crossing(a, b, 0.0, [&](CPoint x) {
    pts.push_back(x);
    return pts.size() < max_points;
  });
  return pts;
}

const char* to_string(Nesting n) {
  switch (n) {
    case Nesting::AIntersect: return "A_INTERSECT";
    case Nesting::BInside: return "B_INSIDE";
    case Nesting::COutside: return "C_OUTSIDE";
    case Nesting::DisjointSideBySide: return "DISJOINT_SIDE_BY_SIDE";
  }
  return "?";
}

Nesting nesting_relation(const JordanCurve& a, const JordanCurve& b) {
  const double eps = std::max(a.geom_eps(), b.geom_eps());
  if (curve_distance(a, b) <= eps) return Nesting::AIntersect;
  // No crossing: every vertex of a lies on the same side of b.
  if (inside(b, a[0])) return Nesting::BInside;
  if (inside(a, b[0])) return Nesting::COutside;
  return Nesting::DisjointSideBySide;
}

// ---------------------------------------------------------------------------
// Region

Region Region::disk(CPoint center, double radius) {
  if (!(radius > 0) || !is_finite(center)) {
    throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
  }
  Region r;
  r.is_disk_ = true;
  r.center_ = center;
  r.radius_ = radius;
  r.bbox_ = {center - CPoint(radius, radius), center + CPoint(radius, radius)};
  return r;
}

Region Region::interior(std::vector<JordanCurve> curves) {
  if (curves.empty()) throw Error(ErrorCode::EmptyInput, "region needs at least one curve");
  Region r;
  r.is_disk_ = false;
  r.curves_ = std::move(curves);
  r.bbox_ = r.curves_.front().bbox();
  for (const auto& c : r.curves_) r.bbox_ = r.bbox_.united(c.bbox());
  r.center_ = r.bbox_.center();
  r.radius_ = 0.5 * r.bbox_.diagonal();

  const Box sq = r.bbox_.squared();
  const double half = 0.5 * sq.width() * 1.01;
  r.accel_shape_ = GridSet::square(sq.center(), half, 512);
  GridSet in = rasterize_interior(r.curves_, r.accel_shape_);
  GridSet edge = dilate(rasterize_outline(r.curves_, r.accel_shape_), 1.5);
  r.accel_.resize(in.cell_count());
  for (std::size_t k = 0; k < r.accel_.size(); ++k) {
    r.accel_[k] = edge.test(k) ? 2 : (in.test(k) ? 1 : 0);
  }
  std::vector<const JordanCurve*> ptrs;
  for (const auto& c : r.curves_) ptrs.push_back(&c);
  r.index_ = std::make_shared<SegmentIndex>(ptrs);
  return r;
}

bool Region::contains(CPoint z) const {
  if (is_disk_) return std::norm(z - center_) < radius_ * radius_;
  if (!bbox_.contains(z)) return false;
  const auto cell = accel_shape_.cell_of(z);
  if (cell) {
    const auto flag = accel_[accel_shape_.index(cell->first, cell->second)];
    if (flag != 2) return flag == 1;
  }
  for (const auto& c : curves_)
    if (inside(c, z)) return true;
  return false;
}

double Region::distance_to_boundary(CPoint z) const {
  if (is_disk_) return std::abs(radius_ - std::abs(z - center_));
  return index_->distance(z);
}

std::vector<JordanCurve> Region::boundary(std::size_t n) const {
  if (is_disk_) return {JordanCurve::circle(center_, radius_, n)};
  return curves_;
}

}  // namespace plkit
