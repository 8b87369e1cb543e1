#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sern {

class Mwc;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box [x0, x1] x [y0, y1].
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

/// [0, width] x [0, height].
struct Rectangle {
  double width = 1.0;
  double height = 1.0;
};

/// Axis-aligned ellipse centred at the origin.
struct Ellipse {
  double semi_x = 1.0;
  double semi_y = 1.0;
};

/// Simple polygon, vertices stored counterclockwise, implicitly closed.
class Polygon {
 public:
  /// Validates (>= 3 vertices, finite, non-zero area, no self intersections)
  /// and reorders clockwise input to counterclockwise.
  static Polygon from_vertices(std::vector<Point> vertices);

  /// One "x y" pair per line, '#' lines and blank lines ignored.
  static Polygon load(const std::filesystem::path& path);
  static Polygon parse(const std::string& text);

  const std::vector<Point>& vertices() const { return vertices_; }

 private:
  explicit Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {}
  std::vector<Point> vertices_;
};

/// Signed shoelace area (positive for counterclockwise).
double signed_area(std::span<const Point> polygon);

/// Sutherland-Hodgman clip of `subject` against the convex window `box`.
/// Concave subjects may yield zero-area bridge edges; the area is unaffected.
std::vector<Point> clip_to_box(std::span<const Point> subject, const Box& box);

/// Area of the unit disk inside [x0, x1] x [y0, y1], closed form.
double unit_disk_box_area(const Box& box);

/// The embedding region.
class Region {
 public:
  using Shape = std::variant<Rectangle, Ellipse, Polygon>;

  static Region rectangle(double width, double height);
  static Region ellipse(double semi_x, double semi_y);
  static Region polygon(Polygon polygon);

  const Shape& shape() const { return shape_; }
  double area() const { return area_; }
  const Box& bounds() const { return bounds_; }
  std::string describe() const;

 private:
  Region(Shape shape, double area, Box bounds) : shape_(std::move(shape)), area_(area), bounds_(bounds) {}

  Shape shape_;
  double area_;
  Box bounds_;
};

/// Boundary counts as inside. Polygons use even-odd ray crossing with an
/// explicit on-edge test.
bool point_in_region(const Region& region, Point p);

/// Area of `cell` intersected with the region.
double cell_area(const Region& region, const Box& cell);

/// True when every point of `cell` is in the region, so sampling inside it
/// needs no membership test. Conservative: touching the boundary is enough
/// to return false.
bool cell_inside_region(const Region& region, const Box& cell);

enum class MetricKind { euclidean, manhattan, discrete, max, custom };

/// Smallest distance between a point of one grid cell and a point of the
/// cell offset from it by (di, dj) cells. Axis gaps are
/// max(|d| - 1, 0) * side, combined under the metric; the discrete metric
/// gives 0, 1 or 2 by the number of positive gaps. Custom metrics carry no
/// structure to exploit, so their bound is 0.
double min_bucket_distance(double side, std::int64_t di, std::int64_t dj, MetricKind metric);

/// Uniform point in the region by rejection from the bounding box.
Point sample_point(const Region& region, Mwc& rng);

struct CellIndex {
  std::uint32_t i = 0;  // column, along x
  std::uint32_t j = 0;  // row, along y
};

/// The region's bounding box tiled by square cells.
///
/// Linear bucket order is row-major: bucket = j * cols + i.
class BucketGrid {
 public:
  /// Cover the bounding box with cols x rows square cells, max(cols, rows) = m.
  static BucketGrid cover(const Region& region, std::uint32_t m);

  std::uint32_t cols() const { return cols_; }
  std::uint32_t rows() const { return rows_; }
  std::uint32_t size() const { return cols_ * rows_; }
  std::uint32_t max_dim() const { return std::max(cols_, rows_); }
  double side() const { return side_; }
  Point origin() const { return origin_; }

  std::uint32_t linear(CellIndex c) const { return c.j * cols_ + c.i; }
  CellIndex cell(std::uint32_t bucket) const { return {bucket % cols_, bucket / cols_}; }

  Box cell_box(CellIndex c) const;
  Box cell_box(std::uint32_t bucket) const { return cell_box(cell(bucket)); }

  double area(std::uint32_t bucket) const { return areas_[bucket]; }
  double probability(std::uint32_t bucket) const { return probabilities_[bucket]; }
  bool interior(std::uint32_t bucket) const { return interior_[bucket] != 0; }
  std::span<const double> areas() const { return areas_; }
  std::span<const double> probabilities() const { return probabilities_; }

  /// The cell containing p; points on a shared edge go to the lower index.
  /// Coordinates outside the grid are clamped to the nearest cell.
  CellIndex locate(Point p) const;

  /// Bytes held by the per-cell tables.
  std::size_t overhead_bytes() const;

 private:
  std::uint32_t cols_ = 1;
  std::uint32_t rows_ = 1;
  double side_ = 1.0;
  Point origin_;
  std::vector<double> areas_;
  std::vector<double> probabilities_;
  std::vector<std::uint8_t> interior_;
};

}  // namespace sern
