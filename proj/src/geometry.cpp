#include "sern/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sern/errors.hpp"
#include "sern/rng.hpp"

namespace sern {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Closed segments [a, b] and [c, d] share at least one point.
bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

void check_simple(const std::vector<Point>& v) {
  const std::size_t n = v.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Point a = v[e];
    const Point b = v[(e + 1) % n];
    if (a.x == b.x && a.y == b.y) throw ParameterError("polygon has repeated consecutive vertices");
    for (std::size_t f = e + 1; f < n; ++f) {
      const Point c = v[f];
      const Point d = v[(f + 1) % n];
      const bool adjacent = f == e + 1 || (e == 0 && f == n - 1);
      if (adjacent) {
        // Neighbours share one endpoint; they must not fold back onto each other.
        const Point shared = f == e + 1 ? b : a;
        const Point p = f == e + 1 ? a : b;
        const Point q = f == e + 1 ? d : c;
        if (cross(shared, p, q) == 0.0 && ((p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y)) > 0.0) {
          throw ParameterError("polygon edges overlap (self-intersecting)");
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) throw ParameterError("polygon is self-intersecting");
    }
  }
}

bool point_in_polygon(const std::vector<Point>& v, Point p) {
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t e = 0, f = n - 1; e < n; f = e++) {
    const Point a = v[e];
    const Point b = v[f];
    if (cross(a, b, p) == 0.0 && on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// Signed area of {0 <= X <= x, 0 <= Y <= y} within the unit disk, oriented
// so that inclusion-exclusion over the box corners gives the box area.
double disk_corner_area(double x, double y) {
  const double sx = x < 0.0 ? -1.0 : 1.0;
  const double sy = y < 0.0 ? -1.0 : 1.0;
  const double ax = std::min(std::abs(x), 1.0);
  const double ay = std::min(std::abs(y), 1.0);
  double area;
  if (ax * ax + ay * ay <= 1.0) {
    area = ax * ay;
  } else {
    // Past xc the circle is lower than ay.
    const double xc = std::sqrt(std::max(0.0, 1.0 - ay * ay));
    auto primitive = [](double t) { return 0.5 * (t * std::sqrt(std::max(0.0, 1.0 - t * t)) + std::asin(t)); };
    area = xc * ay + primitive(ax) - primitive(xc);
  }
  return sx * sy * area;
}

}  // namespace

Polygon Polygon::from_vertices(std::vector<Point> vertices) {
  if (vertices.size() >= 2 && vertices.front().x == vertices.back().x && vertices.front().y == vertices.back().y) {
    vertices.pop_back();  // explicit closing vertex
  }
  if (vertices.size() < 3) throw ParameterError("polygon needs at least 3 vertices");
  for (const Point& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParameterError("polygon vertex is not finite");
  }
  check_simple(vertices);
  const double area = signed_area(vertices);
  if (area == 0.0) throw ParameterError("polygon has zero area");
  if (area < 0.0) std::reverse(vertices.begin(), vertices.end());
  return Polygon(std::move(vertices));
}

Polygon Polygon::parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<Point> vertices;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Point p;
    std::string extra;
    if (!(fields >> p.x >> p.y) || (fields >> extra)) {
      throw ParameterError("polygon line " + std::to_string(line_no) + ": expected two numbers");
    }
    vertices.push_back(p);
  }
  return from_vertices(std::move(vertices));
}

Polygon Polygon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open polygon file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

double signed_area(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t e = 0, f = n - 1; e < n; f = e++) {
    twice += polygon[f].x * polygon[e].y - polygon[e].x * polygon[f].y;
  }
  return 0.5 * twice;
}

std::vector<Point> clip_to_box(std::span<const Point> subject, const Box& box) {
  std::vector<Point> output(subject.begin(), subject.end());
  std::vector<Point> input;

  // One pass per box side; `inside` and `intersect` are parameterised by
  // the axis and the kept half-plane.
  auto clip = [&](auto inside, auto intersect) {
    input.swap(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t e = 0; e < n; ++e) {
      const Point current = input[e];
      const Point previous = input[(e + n - 1) % n];
      const bool cur_in = inside(current);
      const bool prev_in = inside(previous);
      if (cur_in) {
        if (!prev_in) output.push_back(intersect(previous, current));
        output.push_back(current);
      } else if (prev_in) {
        output.push_back(intersect(previous, current));
      }
    }
  };
  auto at_x = [](Point a, Point b, double x) {
    return Point{x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)};
  };
  auto at_y = [](Point a, Point b, double y) {
    return Point{a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y};
  };

  clip([&](Point p) { return p.x >= box.x0; }, [&](Point a, Point b) { return at_x(a, b, box.x0); });
  if (output.empty()) return output;
  clip([&](Point p) { return p.x <= box.x1; }, [&](Point a, Point b) { return at_x(a, b, box.x1); });
  if (output.empty()) return output;
  clip([&](Point p) { return p.y >= box.y0; }, [&](Point a, Point b) { return at_y(a, b, box.y0); });
  if (output.empty()) return output;
  clip([&](Point p) { return p.y <= box.y1; }, [&](Point a, Point b) { return at_y(a, b, box.y1); });
  return output;
}

double unit_disk_box_area(const Box& b) {
  const double x0 = std::clamp(b.x0, -1.0, 1.0);
  const double x1 = std::clamp(b.x1, -1.0, 1.0);
  const double y0 = std::clamp(b.y0, -1.0, 1.0);
  const double y1 = std::clamp(b.y1, -1.0, 1.0);
  if (x1 <= x0 || y1 <= y0) return 0.0;
  const double area =
      disk_corner_area(x1, y1) - disk_corner_area(x0, y1) - disk_corner_area(x1, y0) + disk_corner_area(x0, y0);
  return std::max(0.0, area);
}

Region Region::rectangle(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw ParameterError("rectangle region needs positive finite width and height");
  }
  return Region(Rectangle{width, height}, width * height, Box{0.0, 0.0, width, height});
}

Region Region::ellipse(double semi_x, double semi_y) {
  if (!(semi_x > 0.0) || !(semi_y > 0.0) || !std::isfinite(semi_x) || !std::isfinite(semi_y)) {
    throw ParameterError("ellipse region needs positive finite semi-axes");
  }
  return Region(Ellipse{semi_x, semi_y}, std::numbers::pi * semi_x * semi_y, Box{-semi_x, -semi_y, semi_x, semi_y});
}

Region Region::polygon(Polygon polygon) {
  Box box{polygon.vertices()[0].x, polygon.vertices()[0].y, polygon.vertices()[0].x, polygon.vertices()[0].y};
  for (const Point& p : polygon.vertices()) {
    box.x0 = std::min(box.x0, p.x);
    box.y0 = std::min(box.y0, p.y);
    box.x1 = std::max(box.x1, p.x);
    box.y1 = std::max(box.y1, p.y);
  }
  const double area = signed_area(polygon.vertices());
  return Region(std::move(polygon), area, box);
}

std::string Region::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          out << "rect:" << s.width << ',' << s.height;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          out << "ellipse:" << s.semi_x << ',' << s.semi_y;
        } else {
          out << "polygon(" << s.vertices().size() << " vertices)";
        }
      },
      shape_);
  return out.str();
}

bool point_in_region(const Region& region, Point p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          return p.x >= 0.0 && p.x <= s.width && p.y >= 0.0 && p.y <= s.height;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const double u = p.x / s.semi_x;
          const double v = p.y / s.semi_y;
          return u * u + v * v <= 1.0;
        } else {
          return point_in_polygon(s.vertices(), p);
        }
      },
      region.shape());
}

double cell_area(const Region& region, const Box& cell) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          const double w = std::min(cell.x1, s.width) - std::max(cell.x0, 0.0);
          const double h = std::min(cell.y1, s.height) - std::max(cell.y0, 0.0);
          return w > 0.0 && h > 0.0 ? w * h : 0.0;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const Box unit{cell.x0 / s.semi_x, cell.y0 / s.semi_y, cell.x1 / s.semi_x, cell.y1 / s.semi_y};
          return unit_disk_box_area(unit) * s.semi_x * s.semi_y;
        } else {
          if (cell_inside_region(region, cell)) return cell.area();
          const auto clipped = clip_to_box(s.vertices(), cell);
          return std::max(0.0, signed_area(clipped));
        }
      },
      region.shape());
}

bool cell_inside_region(const Region& region, const Box& cell) {
  const Point corners[4] = {{cell.x0, cell.y0}, {cell.x1, cell.y0}, {cell.x1, cell.y1}, {cell.x0, cell.y1}};
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          return cell.x0 >= 0.0 && cell.y0 >= 0.0 && cell.x1 <= s.width && cell.y1 <= s.height;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          // Convex: the cell is inside iff its corners are.
          for (const Point& c : corners) {
            if (!point_in_region(region, c)) return false;
          }
          return true;
        } else {
          for (const Point& c : corners) {
            if (!point_in_polygon(s.vertices(), c)) return false;
          }
          // Corners inside and no boundary edge touching the cell outline means
          // the whole boundary curve avoids the cell.
          const auto& v = s.vertices();
          for (std::size_t e = 0, f = v.size() - 1; e < v.size(); f = e++) {
            for (int k = 0; k < 4; ++k) {
              if (segments_intersect(v[f], v[e], corners[k], corners[(k + 1) % 4])) return false;
            }
          }
          return true;
        }
      },
      region.shape());
}

Point sample_point(const Region& region, Mwc& rng) {
  const Box& b = region.bounds();
  for (;;) {
    const Point p{b.x0 + rng.next_double() * b.width(), b.y0 + rng.next_double() * b.height()};
    if (point_in_region(region, p)) return p;
  }
}

double min_bucket_distance(double side, std::int64_t di, std::int64_t dj, MetricKind metric) {
  const std::int64_t ai = di < 0 ? -di : di;
  const std::int64_t aj = dj < 0 ? -dj : dj;
  const double g1 = static_cast<double>(std::max<std::int64_t>(ai - 1, 0)) * side;
  const double g2 = static_cast<double>(std::max<std::int64_t>(aj - 1, 0)) * side;
  switch (metric) {
    case MetricKind::euclidean:
      return std::sqrt(g1 * g1 + g2 * g2);
    case MetricKind::manhattan:
      return g1 + g2;
    case MetricKind::max:
      return std::max(g1, g2);
    case MetricKind::discrete:
      return static_cast<double>((g1 > 0.0) + (g2 > 0.0));
    case MetricKind::custom:
      return 0.0;
  }
  return 0.0;
}

BucketGrid BucketGrid::cover(const Region& region, std::uint32_t m) {
  if (m < 1) throw ParameterError("grid size must be at least 1");
  if (!(region.area() > 0.0)) throw ParameterError("region has zero area");
  const Box& b = region.bounds();
  BucketGrid grid;
  grid.side_ = std::max(b.width(), b.height()) / m;
  auto cells_along = [&](double extent) {
    const double ratio = extent / grid.side_;
    const auto count = static_cast<std::uint32_t>(std::ceil(ratio - 1e-9 * ratio));
    return std::clamp<std::uint32_t>(count, 1, m);
  };
  grid.cols_ = b.width() >= b.height() ? m : cells_along(b.width());
  grid.rows_ = b.height() >= b.width() ? m : cells_along(b.height());
  grid.origin_ = {b.x0, b.y0};

  const std::uint32_t cells = grid.size();
  grid.areas_.resize(cells);
  grid.probabilities_.resize(cells);
  grid.interior_.resize(cells);
  double total = 0.0;
  for (std::uint32_t k = 0; k < cells; ++k) {
    const Box box = grid.cell_box(k);
    grid.interior_[k] = cell_inside_region(region, box) ? 1 : 0;
    grid.areas_[k] = grid.interior_[k] ? box.area() : cell_area(region, box);
    // Slivers below float resolution could never accept a sampled point.
    if (grid.areas_[k] < 1e-12 * box.area()) grid.areas_[k] = 0.0;
    total += grid.areas_[k];
  }
  if (!(total > 0.0)) throw ParameterError("region has zero area");
  // Normalise by the summed cell areas so the probabilities sum to 1 to
  // rounding even where the cell areas carry their own error.
  for (std::uint32_t k = 0; k < cells; ++k) grid.probabilities_[k] = grid.areas_[k] / total;
  return grid;
}

Box BucketGrid::cell_box(CellIndex c) const {
  return Box{origin_.x + c.i * side_, origin_.y + c.j * side_, origin_.x + (c.i + 1) * side_,
             origin_.y + (c.j + 1) * side_};
}

CellIndex BucketGrid::locate(Point p) const {
  auto index = [&](double offset, std::uint32_t count) -> std::uint32_t {
    const double t = std::ceil(offset / side_) - 1.0;
    if (!(t > 0.0)) return 0;
    return t >= count - 1 ? count - 1 : static_cast<std::uint32_t>(t);
  };
  return {index(p.x - origin_.x, cols_), index(p.y - origin_.y, rows_)};
}

std::size_t BucketGrid::overhead_bytes() const {
  return areas_.size() * sizeof(double) + probabilities_.size() * sizeof(double) + interior_.size();
}

}  // namespace sern
