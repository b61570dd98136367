#pragma once

#include <utility>
#include <vector>

#include "json.hpp"

#include "riscov/params.hpp"
#include "riscov/rng.hpp"

namespace riscov {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Segment {
  Point center;
  double length = 0.0;
  double angle = 0.0;  // [0, 2pi)
  Point p0() const {
    return {center.x - 0.5 * length * std::cos(angle), center.y - 0.5 * length * std::sin(angle)};
  }
  Point p1() const {
    return {center.x + 0.5 * length * std::cos(angle), center.y + 0.5 * length * std::sin(angle)};
  }
};

struct Disk {
  Point center;
  double radius = 0.0;
  double area() const { return kPi * radius * radius; }
};

/// One sampled realization of the random scene.
struct Scene {
  Disk region;
  std::vector<Segment> blockages;
  std::vector<Point> ris;
  std::vector<Point> users;
  std::vector<Point> bss;
};

Point uniform_in_disk(const Disk& region, Rng& rng);

/// Homogeneous PPP on a disk: Poisson count, i.i.d. uniform positions.
std::vector<Point> sample_ppp(double density, const Disk& region, Rng& rng);

/// Line Boolean blockage field: PPP centers on the region inflated by
/// len_max/2 (segments crossing the boundary are kept), lengths
/// U[len_min, len_max], orientation U[0, 2pi).
std::vector<Segment> sample_blockages(const SystemParams& p, const Disk& region, Rng& rng);

/// Closed-segment intersection via orientation tests; collinear or touching
/// configurations count as intersecting.
bool segments_intersect(const Point& a0, const Point& a1, const Point& b0, const Point& b1,
                        double eps = 1e-12);

/// True iff the a-b link crosses no blockage.
bool is_los(const Point& a, const Point& b, const std::vector<Segment>& blockages,
            double eps = 1e-12);

/// Uniform grid bucket over segments; LoS queries walk the cells along the
/// link and exit on the first hit. Read-only after construction.
class SegmentGrid {
 public:
  SegmentGrid() = default;
  SegmentGrid(const std::vector<Segment>& segs, double cell_size, double eps = 1e-12);
  bool is_los(const Point& a, const Point& b) const;

 private:
  bool cell_blocked(int cx, int cy, const Point& a, const Point& b) const;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0, eps_ = 1e-12;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::pair<Point, Point>>> cells_;
};

nlohmann::json scene_to_json(const Scene& s);
Scene scene_from_json(const nlohmann::json& j);

}  // namespace riscov
