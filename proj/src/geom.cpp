#include "riscov/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace riscov {

Point uniform_in_disk(const Disk& region, Rng& rng) {
  double r = region.radius * std::sqrt(rng.uniform());
  double th = rng.uniform(0.0, 2.0 * kPi);
  return {region.center.x + r * std::cos(th), region.center.y + r * std::sin(th)};
}

std::vector<Point> sample_ppp(double density, const Disk& region, Rng& rng) {
  std::vector<Point> pts;
  if (!(density > 0.0) || !(region.radius > 0.0)) return pts;
  long n = rng.poisson(density * region.area());
  pts.reserve(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) pts.push_back(uniform_in_disk(region, rng));
  return pts;
}

std::vector<Segment> sample_blockages(const SystemParams& p, const Disk& region, Rng& rng) {
  Disk inflated{region.center, region.radius + 0.5 * p.len_max};
  std::vector<Point> centers = sample_ppp(p.lambda_b, inflated, rng);
  std::vector<Segment> segs;
  segs.reserve(centers.size());
  for (const Point& c : centers) {
    Segment s;
    s.center = c;
    s.length = rng.uniform(p.len_min, p.len_max);
    s.angle = rng.uniform(0.0, 2.0 * kPi);
    segs.push_back(s);
  }
  return segs;
}

namespace {

inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool on_segment(const Point& p, const Point& q, const Point& r, double eps) {
  return r.x >= std::min(p.x, q.x) - eps && r.x <= std::max(p.x, q.x) + eps &&
         r.y >= std::min(p.y, q.y) - eps && r.y <= std::max(p.y, q.y) + eps;
}

}  // namespace

bool segments_intersect(const Point& a0, const Point& a1, const Point& b0, const Point& b1,
                        double eps) {
  double d1 = cross(b0, b1, a0);
  double d2 = cross(b0, b1, a1);
  double d3 = cross(a0, a1, b0);
  double d4 = cross(a0, a1, b1);

  bool a_straddles = (d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps);
  bool b_straddles = (d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps);
  if (a_straddles && b_straddles) return true;

  if (std::fabs(d1) <= eps && on_segment(b0, b1, a0, eps)) return true;
  if (std::fabs(d2) <= eps && on_segment(b0, b1, a1, eps)) return true;
  if (std::fabs(d3) <= eps && on_segment(a0, a1, b0, eps)) return true;
  if (std::fabs(d4) <= eps && on_segment(a0, a1, b1, eps)) return true;
  return false;
}

bool is_los(const Point& a, const Point& b, const std::vector<Segment>& blockages, double eps) {
  for (const Segment& s : blockages) {
    if (segments_intersect(a, b, s.p0(), s.p1(), eps)) return false;
  }
  return true;
}

SegmentGrid::SegmentGrid(const std::vector<Segment>& segs, double cell_size, double eps)
    : cell_(std::max(cell_size, 1e-6)), eps_(eps) {
  if (segs.empty()) return;
  double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
  double ymin = xmin, ymax = xmax;
  for (const Segment& s : segs) {
    for (const Point& p : {s.p0(), s.p1()}) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  x0_ = xmin - cell_;
  y0_ = ymin - cell_;
  nx_ = static_cast<int>((xmax - x0_) / cell_) + 2;
  ny_ = static_cast<int>((ymax - y0_) / cell_) + 2;
  cells_.resize(static_cast<size_t>(nx_) * ny_);
  for (const Segment& s : segs) {
    Point p0 = s.p0(), p1 = s.p1();
    int cx0 = static_cast<int>((std::min(p0.x, p1.x) - x0_) / cell_);
    int cx1 = static_cast<int>((std::max(p0.x, p1.x) - x0_) / cell_);
    int cy0 = static_cast<int>((std::min(p0.y, p1.y) - y0_) / cell_);
    int cy1 = static_cast<int>((std::max(p0.y, p1.y) - y0_) / cell_);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx)
        cells_[static_cast<size_t>(cy) * nx_ + cx].emplace_back(p0, p1);
  }
}

bool SegmentGrid::cell_blocked(int cx, int cy, const Point& a, const Point& b) const {
  const auto& bucket = cells_[static_cast<size_t>(cy) * nx_ + cx];
  for (const auto& [p0, p1] : bucket) {
    if (segments_intersect(a, b, p0, p1, eps_)) return true;
  }
  return false;
}

bool SegmentGrid::is_los(const Point& a, const Point& b) const {
  if (cells_.empty()) return true;

  // Clip the query to the grid box; anything outside cannot hit a stored segment.
  const double w = nx_ * cell_, h = ny_ * cell_;
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  // Liang-Barsky edge constraint p*t <= q
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    double t = q / p;
    if (p < 0.0) {
      if (t > t1) return false;
      if (t > t0) t0 = t;
    } else {
      if (t < t0) return false;
      if (t < t1) t1 = t;
    }
    return true;
  };
  if (!clip(-dx, a.x - x0_) || !clip(dx, (x0_ + w) - a.x) ||
      !clip(-dy, a.y - y0_) || !clip(dy, (y0_ + h) - a.y) || t0 > t1)
    return true;

  Point s{a.x + t0 * dx, a.y + t0 * dy};
  Point e{a.x + t1 * dx, a.y + t1 * dy};
  int cx = std::clamp(static_cast<int>((s.x - x0_) / cell_), 0, nx_ - 1);
  int cy = std::clamp(static_cast<int>((s.y - y0_) / cell_), 0, ny_ - 1);
  int ex = std::clamp(static_cast<int>((e.x - x0_) / cell_), 0, nx_ - 1);
  int ey = std::clamp(static_cast<int>((e.y - y0_) / cell_), 0, ny_ - 1);

  int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  double t_max_x = inf, t_delta_x = inf, t_max_y = inf, t_delta_y = inf;
  if (step_x != 0) {
    double edge = x0_ + (cx + (step_x > 0 ? 1 : 0)) * cell_;
    t_max_x = (edge - a.x) / dx;
    t_delta_x = cell_ / std::fabs(dx);
  }
  if (step_y != 0) {
    double edge = y0_ + (cy + (step_y > 0 ? 1 : 0)) * cell_;
    t_max_y = (edge - a.y) / dy;
    t_delta_y = cell_ / std::fabs(dy);
  }

  for (int guard = nx_ + ny_ + 4; guard > 0; --guard) {
    if (cell_blocked(cx, cy, a, b)) return false;
    if (cx == ex && cy == ey) break;
    if (t_max_x < t_max_y) {
      cx += step_x;
      t_max_x += t_delta_x;
      if (cx < 0 || cx >= nx_) break;
    } else {
      cy += step_y;
      t_max_y += t_delta_y;
      if (cy < 0 || cy >= ny_) break;
    }
  }
  return true;
}

nlohmann::json scene_to_json(const Scene& s) {
  nlohmann::json j;
  j["region"] = {{"cx", s.region.center.x}, {"cy", s.region.center.y}, {"radius", s.region.radius}};
  auto pts = [](const std::vector<Point>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const Point& p : v) a.push_back({p.x, p.y});
    return a;
  };
  nlohmann::json b = nlohmann::json::array();
  for (const Segment& seg : s.blockages)
    b.push_back({seg.center.x, seg.center.y, seg.length, seg.angle});
  j["blockages"] = std::move(b);
  j["ris"] = pts(s.ris);
  j["users"] = pts(s.users);
  j["bss"] = pts(s.bss);
  return j;
}

Scene scene_from_json(const nlohmann::json& j) {
  Scene s;
  const auto& r = j.at("region");
  s.region = {{r.at("cx").get<double>(), r.at("cy").get<double>()}, r.at("radius").get<double>()};
  for (const auto& e : j.at("blockages"))
    s.blockages.push_back({{e.at(0).get<double>(), e.at(1).get<double>()},
                           e.at(2).get<double>(), e.at(3).get<double>()});
  auto pts = [](const nlohmann::json& a) {
    std::vector<Point> v;
    for (const auto& e : a) v.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    return v;
  };
  s.ris = pts(j.at("ris"));
  s.users = pts(j.at("users"));
  s.bss = pts(j.at("bss"));
  return s;
}

}  // namespace riscov
