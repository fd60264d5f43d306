#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "plkit/geometry.hpp"

namespace plkit {

GridSet::GridSet(Box rect, int nx, int ny) : rect_(rect), nx_(nx), ny_(ny) {
  if (nx < 16 || ny < 16) throw Error(ErrorCode::InvalidArgument, "grid needs at least 16x16 cells");
  if (!(rect.width() > 0) || !(rect.height() > 0)) {
    throw Error(ErrorCode::InvalidArgument, "grid rectangle must have positive extent");
  }
  cell_ = rect.width() / nx;
  if (std::abs(rect.height() / ny - cell_) > 1e-9 * cell_) {
    throw Error(ErrorCode::InvalidArgument, "grid cells must be square");
  }
  cells_.assign(static_cast<std::size_t>(nx) * ny, 0);
}

GridSet GridSet::square(CPoint center, double half_width, int n) {
  return GridSet({center - CPoint(half_width, half_width), center + CPoint(half_width, half_width)}, n, n);
}

// Centers are placed symmetrically about the rectangle midpoint so that a
// rectangle centered on the real axis gives exactly conjugate rows.
CPoint GridSet::center(int i, int j) const {
  const CPoint mid = rect_.center();
  return {mid.real() + (i + 0.5 - 0.5 * nx_) * cell_, mid.imag() + (j + 0.5 - 0.5 * ny_) * cell_};
}

std::optional<std::pair<int, int>> GridSet::cell_of(CPoint z) const {
  const CPoint mid = rect_.center();
  const double fi = std::floor((z.real() - mid.real()) / cell_ + 0.5 * nx_);
  const double fj = std::floor((z.imag() - mid.imag()) / cell_ + 0.5 * ny_);
  if (!(fi >= 0 && fi < nx_ && fj >= 0 && fj < ny_)) return std::nullopt;
  return std::make_pair(static_cast<int>(fi), static_cast<int>(fj));
}

bool GridSet::contains(CPoint z) const {
  const auto c = cell_of(z);
  return c && test(c->first, c->second);
}

bool GridSet::near(CPoint z, int cells) const {
  const CPoint mid = rect_.center();
  const int ci = static_cast<int>(std::floor((z.real() - mid.real()) / cell_ + 0.5 * nx_));
  const int cj = static_cast<int>(std::floor((z.imag() - mid.imag()) / cell_ + 0.5 * ny_));
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  for (int j = std::max(0, cj - cells); j <= std::min(ny_ - 1, cj + cells); ++j)
    for (int i = std::max(0, ci - cells); i <= std::min(nx_ - 1, ci + cells); ++i)
      if (test(i, j)) return true;
  return false;
}

std::size_t GridSet::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

bool GridSet::same_shape(const GridSet& o) const {
  return nx_ == o.nx_ && ny_ == o.ny_ && rect_.lo == o.rect_.lo && rect_.hi == o.rect_.hi;
}

std::vector<std::size_t> GridSet::occupied() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < cells_.size(); ++k)
    if (cells_[k]) out.push_back(k);
  return out;
}

GridSet GridSet::united(const GridSet& o) const {
  if (!same_shape(o)) throw Error(ErrorCode::InvalidArgument, "grid shapes differ");
  GridSet r = *this;
  for (std::size_t k = 0; k < cells_.size(); ++k) r.cells_[k] |= o.cells_[k];
  return r;
}

GridSet GridSet::intersected(const GridSet& o) const {
  if (!same_shape(o)) throw Error(ErrorCode::InvalidArgument, "grid shapes differ");
  GridSet r = *this;
  for (std::size_t k = 0; k < cells_.size(); ++k) r.cells_[k] &= o.cells_[k];
  return r;
}

bool GridSet::subset_of(const GridSet& o) const {
  if (!same_shape(o)) throw Error(ErrorCode::InvalidArgument, "grid shapes differ");
  for (std::size_t k = 0; k < cells_.size(); ++k)
    if (cells_[k] && !o.cells_[k]) return false;
  return true;
}

GridSet topological_hull(const GridSet& s) {
  if (s.empty()) throw Error(ErrorCode::EmptyInput, "topological hull of an empty set");
  const int nx = s.nx(), ny = s.ny();
  std::vector<std::uint8_t> outside(s.cell_count(), 0);
  std::vector<std::size_t> stack;
  auto seed = [&](int i, int j) {
    const std::size_t k = s.index(i, j);
    if (!s.test(k) && !outside[k]) {
      outside[k] = 1;
      stack.push_back(k);
    }
  };
  for (int i = 0; i < nx; ++i) {
    seed(i, 0);
    seed(i, ny - 1);
  }
  for (int j = 0; j < ny; ++j) {
    seed(0, j);
    seed(nx - 1, j);
  }
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    if (i > 0) seed(i - 1, j);
    if (i + 1 < nx) seed(i + 1, j);
    if (j > 0) seed(i, j - 1);
    if (j + 1 < ny) seed(i, j + 1);
  }
  GridSet h = s.empty_like();
  for (std::size_t k = 0; k < outside.size(); ++k) h.set(k, !outside[k]);
  return h;
}

namespace {

// Exact 1-D squared distance transform (lower envelope of parabolas).
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == inf) continue;
    if (f[v[k]] == inf) {
      v[k] = q;
      continue;
    }
    double s;
    while (true) {
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = f[v[k]] == inf ? inf : double(q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

}  // namespace

std::vector<double> distance_transform_sq(const GridSet& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const int nx = s.nx(), ny = s.ny();
  std::vector<double> grid(s.cell_count());
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = s.test(k) ? 0.0 : inf;
  const int n = std::max(nx, ny);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) f[j] = grid[s.index(i, j)];
    edt_1d(f.data(), d.data(), ny, v, z);
    for (int j = 0; j < ny; ++j) grid[s.index(i, j)] = d[j];
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) f[i] = grid[s.index(i, j)];
    edt_1d(f.data(), d.data(), nx, v, z);
    for (int i = 0; i < nx; ++i) grid[s.index(i, j)] = d[i];
  }
  return grid;
}

GridSet dilate(const GridSet& s, double radius) {
  GridSet out = s.empty_like();
  if (s.empty()) return out;
  const auto dt = distance_transform_sq(s);
  const double r2 = radius * radius + 1e-9;
  for (std::size_t k = 0; k < dt.size(); ++k) out.set(k, dt[k] <= r2);
  return out;
}

double hausdorff_cells(const GridSet& a, const GridSet& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::InvalidArgument, "grid shapes differ");
  const bool ea = a.empty(), eb = b.empty();
  if (ea && eb) return 0.0;
  if (ea || eb) return std::numeric_limits<double>::infinity();
  const auto da = distance_transform_sq(a);
  const auto db = distance_transform_sq(b);
  double h2 = 0.0;
  for (std::size_t k = 0; k < da.size(); ++k) {
    if (a.test(k)) h2 = std::max(h2, db[k]);
    if (b.test(k)) h2 = std::max(h2, da[k]);
  }
  return std::sqrt(h2);
}

int label_components(const GridSet& s, std::vector<int>& labels) {
  const int nx = s.nx(), ny = s.ny();
  labels.assign(s.cell_count(), 0);
  int count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (!s.test(start) || labels[start]) continue;
    ++count;
    labels[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
          const std::size_t q = s.index(ii, jj);
          if (s.test(q) && !labels[q]) {
            labels[q] = count;
            stack.push_back(q);
          }
        }
    }
  }
  return count;
}

std::vector<GridSet> components(const GridSet& s) {
  std::vector<int> labels;
  const int n = label_components(s, labels);
  std::vector<GridSet> out(n, s.empty_like());
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k]) out[labels[k] - 1].set(k);
  return out;
}

GridSet largest_component(const GridSet& s) {
  std::vector<int> labels;
  const int n = label_components(s, labels);
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no occupied cells");
  std::vector<std::size_t> sizes(n + 1, 0);
  for (int l : labels) ++sizes[l];
  sizes[0] = 0;
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  GridSet out = s.empty_like();
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == best) out.set(k);
  return out;
}

GridSet rasterize_interior(const std::vector<JordanCurve>& curves, const GridSet& shape) {
  GridSet out = shape.empty_like();
  const int nx = shape.nx(), ny = shape.ny();
  const double h = shape.cell_size();
  const CPoint mid = shape.rect().center();
  std::vector<std::vector<double>> rows(ny);
  for (const auto& curve : curves) {
    for (auto& r : rows) r.clear();
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const CPoint a = curve[k], b = curve.next(k);
      const double ylo = std::min(a.imag(), b.imag()), yhi = std::max(a.imag(), b.imag());
      if (ylo == yhi) continue;
      // Rows whose center y satisfies ylo <= y < yhi.
      const int j0 = std::max(0, static_cast<int>(std::ceil((ylo - mid.imag()) / h + 0.5 * ny - 0.5)));
      const int j1 = std::min(ny - 1, static_cast<int>(std::ceil((yhi - mid.imag()) / h + 0.5 * ny - 0.5)) - 1);
      for (int j = j0; j <= j1; ++j) {
        const double y = mid.imag() + (j + 0.5 - 0.5 * ny) * h;
        if (y < ylo || y >= yhi) continue;
        const double t = (y - a.imag()) / (b.imag() - a.imag());
        rows[j].push_back(a.real() + t * (b.real() - a.real()));
      }
    }
    for (int j = 0; j < ny; ++j) {
      auto& xs = rows[j];
      std::sort(xs.begin(), xs.end());
      for (std::size_t p = 0; p + 1 < xs.size(); p += 2) {
        const int i0 = std::max(0, static_cast<int>(std::ceil((xs[p] - mid.real()) / h + 0.5 * nx - 0.5)));
        const int i1 = std::min(nx - 1, static_cast<int>(std::ceil((xs[p + 1] - mid.real()) / h + 0.5 * nx - 0.5)) - 1);
        for (int i = i0; i <= i1; ++i) out.set(i, j);
      }
    }
  }
  return out;
}

GridSet rasterize_outline(const std::vector<JordanCurve>& curves, const GridSet& shape) {
  GridSet out = shape.empty_like();
  const double h = shape.cell_size();
  for (const auto& curve : curves) {
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const CPoint a = curve[k], b = curve.next(k);
      const int steps = std::max(1, static_cast<int>(std::ceil(4.0 * std::abs(b - a) / h)));
      for (int s = 0; s <= steps; ++s) {
        const auto c = shape.cell_of(a + (b - a) * (double(s) / steps));
        if (c) out.set(c->first, c->second);
      }
    }
  }
  return out;
}

GridSet rasterize_collar(const std::vector<JordanCurve>& curves, const GridSet& shape, double radius) {
  GridSet out = shape.empty_like();
  const double h = shape.cell_size();
  const Box& r = shape.rect();
  for (const auto& curve : curves) {
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const CPoint a = curve[k], b = curve.next(k);
      const int i0 = std::max(0, static_cast<int>(std::floor((std::min(a.real(), b.real()) - radius - r.lo.real()) / h)));
      const int i1 = std::min(shape.nx() - 1, static_cast<int>(std::floor((std::max(a.real(), b.real()) + radius - r.lo.real()) / h)));
      const int j0 = std::max(0, static_cast<int>(std::floor((std::min(a.imag(), b.imag()) - radius - r.lo.imag()) / h)));
      const int j1 = std::min(shape.ny() - 1, static_cast<int>(std::floor((std::max(a.imag(), b.imag()) + radius - r.lo.imag()) / h)));
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          if (!out.test(i, j) && point_segment_distance(shape.center(i, j), a, b) <= radius) out.set(i, j);
    }
  }
  return out;
}

namespace {

// Fills diagonal-only contacts so the cell-edge boundary has no pinch vertices.
bool fill_pinches(GridSet& s) {
  bool changed = false;
  for (int j = 0; j + 1 < s.ny(); ++j)
    for (int i = 0; i + 1 < s.nx(); ++i) {
      const bool a = s.test(i, j), b = s.test(i + 1, j), c = s.test(i, j + 1), d = s.test(i + 1, j + 1);
      if (a && d && !b && !c) {
        s.set(i + 1, j);
        changed = true;
      } else if (b && c && !a && !d) {
        s.set(i, j);
        changed = true;
      }
    }
  return changed;
}

}  // namespace

JordanCurve outer_boundary(const GridSet& input) {
  GridSet s = topological_hull(largest_component(input));
  while (fill_pinches(s)) s = topological_hull(s);

  const int nx = s.nx(), ny = s.ny();
  auto occ = [&](int i, int j) { return i >= 0 && j >= 0 && i < nx && j < ny && s.test(i, j); };
  // Directed cell edges with the set on the left; keys are corner indices.
  const auto key = [&](int i, int j) { return static_cast<long long>(j) * (nx + 1) + i; };
  std::map<long long, long long> next;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!occ(i, j)) continue;
      if (!occ(i, j - 1)) next[key(i, j)] = key(i + 1, j);
      if (!occ(i + 1, j)) next[key(i + 1, j)] = key(i + 1, j + 1);
      if (!occ(i, j + 1)) next[key(i + 1, j + 1)] = key(i, j + 1);
      if (!occ(i - 1, j)) next[key(i, j + 1)] = key(i, j);
    }
  if (next.empty()) throw Error(ErrorCode::EmptyInput, "no boundary to trace");

  const long long start = next.begin()->first;
  std::vector<long long> loop;
  long long cur = start;
  do {
    loop.push_back(cur);
    const auto it = next.find(cur);
    if (it == next.end()) throw Error(ErrorCode::InvalidArgument, "open cell boundary");
    cur = it->second;
    if (loop.size() > next.size()) throw Error(ErrorCode::InvalidArgument, "cell boundary does not close");
  } while (cur != start);

  const CPoint mid = s.rect().center();
  const double h = s.cell_size();
  auto corner = [&](long long k) {
    const int i = static_cast<int>(k % (nx + 1)), j = static_cast<int>(k / (nx + 1));
    return CPoint(mid.real() + (i - 0.5 * nx) * h, mid.imag() + (j - 0.5 * ny) * h);
  };
  std::vector<CPoint> pts;
  const std::size_t m = loop.size();
  for (std::size_t k = 0; k < m; ++k) {
    const CPoint prev = corner(loop[(k + m - 1) % m]), here = corner(loop[k]), nxt = corner(loop[(k + 1) % m]);
    const CPoint d1 = here - prev, d2 = nxt - here;
    if (d1.real() * d2.imag() - d1.imag() * d2.real() != 0.0) pts.push_back(here);
  }
  // Tiny sets: subdivide so the polyline meets the vertex minimum.
  while (pts.size() < 8) {
    std::vector<CPoint> finer;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      finer.push_back(pts[k]);
      finer.push_back(0.5 * (pts[k] + pts[(k + 1) % pts.size()]));
    }
    pts.swap(finer);
  }
  return JordanCurve(std::move(pts));
}

}  // namespace plkit
