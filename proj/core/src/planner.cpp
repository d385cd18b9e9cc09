#include "fitslam/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>

namespace fitslam {

bool can_move(const BinaryTraversabilityGrid& nav, Cell from, int di, int dj) {
  const GridSpec& spec = nav.spec();
  const Cell to{from.i + di, from.j + dj};
  if (!spec.contains(to) || nav(to) != NavState::Free) return false;
  if (di != 0 && dj != 0) {
    const bool side_a = nav(Cell{from.i + di, from.j}) == NavState::Free;
    const bool side_b = nav(Cell{from.i, from.j + dj}) == NavState::Free;
    if (!side_a && !side_b) return false;
  }
  return true;
}

namespace {

constexpr std::int32_t kNone = -1;

struct Steps {
  std::int32_t axis = 0;
  std::int32_t diagonal = 0;
  [[nodiscard]] double cost() const { return step_cost_cells(axis, diagonal); }
};

double octile(Cell a, Cell b) {
  const int dx = std::abs(a.i - b.i);
  const int dy = std::abs(a.j - b.j);
  return step_cost_cells(std::max(dx, dy) - std::min(dx, dy), std::min(dx, dy));
}

struct OpenEntry {
  double f;
  double g;
  std::size_t idx;
};

// std::priority_queue pops the "largest"; rank smaller f, then larger g,
// then smaller index as larger.
struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.idx > b.idx;
  }
};

struct Sweep {
  std::vector<Steps> steps;
  std::vector<double> g;
  std::vector<std::int32_t> parent;
  std::vector<char> closed;

  explicit Sweep(std::size_t n)
      : steps(n), g(n, DistanceField::kUnreachable), parent(n, kNone), closed(n, 0) {}
};

// Shared best-first loop. With a zero heuristic it is Dijkstra.
template <typename Heuristic, typename OnSettle>
void search(const BinaryTraversabilityGrid& nav, Cell start, Sweep& sw, Heuristic h, OnSettle on_settle) {
  const GridSpec& spec = nav.spec();
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  const std::size_t s = spec.index(start);
  sw.g[s] = 0.0;
  open.push({h(start), 0.0, s});
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (sw.closed[top.idx]) continue;
    sw.closed[top.idx] = 1;
    const Cell c = spec.cell_at(top.idx);
    if (on_settle(c, top.idx)) return;
    for (const auto& [di, dj] : kNeighbors8) {
      if (!can_move(nav, c, di, dj)) continue;
      const Cell n{c.i + di, c.j + dj};
      const std::size_t nidx = spec.index(n);
      if (sw.closed[nidx]) continue;
      Steps ns = sw.steps[top.idx];
      if (di != 0 && dj != 0) {
        ++ns.diagonal;
      } else {
        ++ns.axis;
      }
      const double ng = ns.cost();
      if (ng < sw.g[nidx]) {
        sw.g[nidx] = ng;
        sw.steps[nidx] = ns;
        sw.parent[nidx] = static_cast<std::int32_t>(top.idx);
        open.push({ng + h(n), ng, nidx});
      }
    }
  }
}

}  // namespace

DistanceField distance_field(const BinaryTraversabilityGrid& nav, Cell start, std::span<const Cell> targets) {
  const GridSpec& spec = nav.spec();
  if (!spec.contains(start)) throw OutOfBounds("start outside grid");
  Sweep sw(spec.size());

  std::vector<char> is_target(targets.empty() ? 0 : spec.size(), 0);
  std::size_t remaining = 0;
  for (const Cell& t : targets) {
    if (!spec.contains(t)) continue;
    const std::size_t idx = spec.index(t);
    if (!is_target[idx]) ++remaining;
    is_target[idx] = 1;
  }
  const bool bounded = remaining > 0;

  search(nav, start, sw, [](Cell) { return 0.0; }, [&](Cell, std::size_t idx) {
    if (bounded && is_target[idx] && --remaining == 0) return true;
    return false;
  });

  std::vector<double> cost(spec.size(), DistanceField::kUnreachable);
  for (std::size_t k = 0; k < cost.size(); ++k) {
    if (sw.closed[k]) cost[k] = sw.steps[k].cost() * spec.resolution;
  }
  return DistanceField(spec, std::move(cost));
}

Path plan(const BinaryTraversabilityGrid& nav, Cell start, Cell goal, const PlanOptions& options) {
  const GridSpec& spec = nav.spec();
  if (!spec.contains(start)) throw OutOfBounds("start outside grid");
  if (!spec.contains(goal)) throw OutOfBounds("goal outside grid");

  Path path;
  if (start == goal) {
    path.cells.push_back(start);
    return path;
  }
  if (nav(goal) != NavState::Free) throw NoPath("goal is not Free");

  // Exact cost-to-go for the heuristic audit. Moves are symmetric, so a
  // sweep from the goal gives the remaining cost of every node.
  DistanceField to_goal;
  if (options.verify_heuristic) to_goal = distance_field(nav, goal);

  Sweep sw(spec.size());
  bool found = false;
  search(nav, start, sw, [&](Cell c) { return octile(c, goal); }, [&](Cell c, std::size_t) {
    if (options.verify_heuristic && to_goal.reachable(c) &&
        octile(c, goal) * spec.resolution > to_goal.cost(c) + 1e-9) {
      throw std::logic_error("octile heuristic overestimates at cell (" + std::to_string(c.i) + ", " +
                             std::to_string(c.j) + ")");
    }
    if (c == goal) {
      found = true;
      return true;
    }
    return false;
  });
  if (!found) throw NoPath("goal unreachable");

  const std::size_t g = spec.index(goal);
  for (std::int32_t k = static_cast<std::int32_t>(g); k != kNone; k = sw.parent[static_cast<std::size_t>(k)]) {
    path.cells.push_back(spec.cell_at(static_cast<std::size_t>(k)));
  }
  std::reverse(path.cells.begin(), path.cells.end());
  path.axis_steps = sw.steps[g].axis;
  path.diagonal_steps = sw.steps[g].diagonal;
  path.length_m = sw.steps[g].cost() * spec.resolution;
  return path;
}

std::vector<Waypoint> sample_waypoints(const Path& path, const GridSpec& spec, double spacing_m) {
  if (!(spacing_m > 0.0)) throw ConfigError("waypoint spacing must be positive");
  if (path.cells.empty()) throw ConfigError("cannot sample an empty path");

  std::vector<Point2> pts;
  pts.reserve(path.cells.size());
  for (const Cell& c : path.cells) pts.push_back(cell_to_world(spec, c));

  std::vector<Point2> samples{pts.front()};
  double next = spacing_m;
  double walked = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double dx = pts[k].x - pts[k - 1].x;
    const double dy = pts[k].y - pts[k - 1].y;
    const double seg = std::hypot(dx, dy);
    while (seg > 0.0 && next < walked + seg - 1e-9) {
      const double t = (next - walked) / seg;
      samples.push_back({pts[k - 1].x + t * dx, pts[k - 1].y + t * dy});
      next += spacing_m;
    }
    walked += seg;
  }
  if (pts.size() > 1) samples.push_back(pts.back());

  std::vector<Waypoint> out;
  out.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    Waypoint w{samples[k].x, samples[k].y, 0.0};
    if (k + 1 < samples.size()) {
      w.heading = std::atan2(samples[k + 1].y - samples[k].y, samples[k + 1].x - samples[k].x);
    } else if (k > 0) {
      w.heading = out.back().heading;
    }
    out.push_back(w);
  }
  return out;
}

}  // namespace fitslam
