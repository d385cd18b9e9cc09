#include "fitslam/frontier.hpp"

#include <algorithm>
#include <deque>

namespace fitslam {

bool ExplorationBoundary::contains(const GridSpec& spec, Cell c) const {
  return contains(spec.origin_x + (c.i + 0.5) * spec.resolution, spec.origin_y + (c.j + 0.5) * spec.resolution);
}

void Blacklist::add(Cell c) { ++entries_[key(c)]; }

bool Blacklist::contains(Cell c) const { return entries_.contains(key(c)); }

bool Blacklist::suppresses(Cell c) const {
  if (entries_.empty()) return false;
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (entries_.contains(key(Cell{c.i + di, c.j + dj}))) return true;
    }
  }
  return false;
}

int Blacklist::failures(Cell c) const {
  auto it = entries_.find(key(c));
  return it == entries_.end() ? 0 : it->second;
}

std::vector<Cell> Blacklist::cells() const {
  std::vector<Cell> out;
  out.reserve(entries_.size());
  for (const auto& [k, count] : entries_) {
    (void)count;
    out.push_back(Cell{static_cast<int>(static_cast<std::uint32_t>(k & 0xffffffff)), static_cast<int>(k >> 32)});
  }
  return out;
}

std::vector<Cell> detect_frontiers(const OccupancyGrid& occ, const BinaryTraversabilityGrid& nav,
                                   const ExplorationBoundary& boundary) {
  const GridSpec& spec = occ.spec();
  if (!(nav.spec() == spec)) throw ConfigError("occupancy and traversability grids differ in geometry");

  // Boundary as an inclusive cell window; a cell is inside when its center is.
  std::vector<char> inside(spec.size(), 0);
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) inside[spec.index(Cell{i, j})] = boundary.contains(spec, Cell{i, j});
  }

  std::vector<Cell> frontier;
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) {
      const Cell c{i, j};
      const std::size_t idx = spec.index(c);
      if (!inside[idx] || nav[idx] != NavState::Free || occ.is_unknown(idx)) continue;
      for (const auto& [di, dj] : kNeighbors8) {
        const Cell n{i + di, j + dj};
        if (!spec.contains(n)) continue;
        const std::size_t nidx = spec.index(n);
        if (inside[nidx] && occ.is_unknown(nidx)) {
          frontier.push_back(c);
          break;
        }
      }
    }
  }
  return frontier;
}

std::vector<FrontierCluster> cluster_frontiers(const GridSpec& spec, std::span<const Cell> cells,
                                               int max_cluster_size, const Blacklist& blacklist) {
  if (max_cluster_size < 1) throw ConfigError("max_cluster_size must be >= 1");

  std::vector<std::size_t> seeds;
  seeds.reserve(cells.size());
  std::vector<char> member(spec.size(), 0);
  for (const Cell& c : cells) {
    if (!spec.contains(c)) throw OutOfBounds("frontier cell outside grid");
    const std::size_t idx = spec.index(c);
    if (!member[idx]) seeds.push_back(idx);
    member[idx] = 1;
  }
  std::sort(seeds.begin(), seeds.end());

  std::vector<FrontierCluster> clusters;
  std::vector<char> visited(spec.size(), 0);
  std::deque<Cell> queue;
  std::vector<Cell> order;
  const auto cap = static_cast<std::size_t>(max_cluster_size);

  for (std::size_t seed : seeds) {
    if (visited[seed]) continue;
    order.clear();
    visited[seed] = 1;
    queue.push_back(spec.cell_at(seed));
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      order.push_back(c);
      for (const auto& [di, dj] : kNeighbors8) {
        const Cell n{c.i + di, c.j + dj};
        if (!spec.contains(n)) continue;
        const std::size_t nidx = spec.index(n);
        if (member[nidx] && !visited[nidx]) {
          visited[nidx] = 1;
          queue.push_back(n);
        }
      }
    }
    for (std::size_t start = 0; start < order.size(); start += cap) {
      const std::size_t end = std::min(order.size(), start + cap);
      FrontierCluster cluster;
      cluster.cells.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                           order.begin() + static_cast<std::ptrdiff_t>(end));
      cluster.candidate = cluster.cells[(cluster.cells.size() - 1) / 2];
      if (blacklist.suppresses(cluster.candidate)) continue;
      clusters.push_back(std::move(cluster));
    }
  }
  return clusters;
}

}  // namespace fitslam
