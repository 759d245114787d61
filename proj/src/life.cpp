#include "interactivity/life.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace interactivity::ulenv {

CellSet life_step(const CellSet& state) {
  std::map<Cell, int> neighbour_count;
  for (const Cell& c : state) {
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy)
        if (dx != 0 || dy != 0) neighbour_count[{c.first + dx, c.second + dy}] += 1;
  }
  CellSet next;
  for (const auto& [cell, n] : neighbour_count) {
    if (n == 3 || (n == 2 && state.count(cell))) next.insert(cell);
  }
  return next;
}

CellSet life_step_n(CellSet state, int n) {
  for (int i = 0; i < n; ++i) state = life_step(state);
  return state;
}

std::map<Cell, int> restrict_state(const CellSet& state, const CellSet& F) {
  std::map<Cell, int> sub;
  for (const Cell& c : F) sub[c] = state.count(c) ? 1 : 0;
  return sub;
}

CellSet life_boundary(const CellSet& F, int k) {
  if (k < 0) throw std::invalid_argument("life_boundary: k must be non-negative");
  CellSet hull;
  for (const Cell& c : F)
    for (long dx = -k; dx <= k; ++dx)
      for (long dy = -k; dy <= k; ++dy) hull.insert({c.first + dx, c.second + dy});
  CellSet boundary;
  for (const Cell& c : hull)
    if (!F.count(c)) boundary.insert(c);
  return boundary;
}

namespace {

// Axis-aligned window comfortably covering F, the boundary, and extra cells
// whose values the locality check is free to scramble.
struct Window {
  long x0, x1, y0, y1;
};

Window window_around(const CellSet& F, const CellSet& boundary, int margin) {
  Window w{0, 0, 0, 0};
  bool first = true;
  auto extend = [&](const Cell& c) {
    if (first) {
      w = {c.first, c.first, c.second, c.second};
      first = false;
    } else {
      w.x0 = std::min(w.x0, c.first);
      w.x1 = std::max(w.x1, c.first);
      w.y0 = std::min(w.y0, c.second);
      w.y1 = std::max(w.y1, c.second);
    }
  };
  for (const Cell& c : F) extend(c);
  for (const Cell& c : boundary) extend(c);
  w.x0 -= margin;
  w.x1 += margin;
  w.y0 -= margin;
  w.y1 += margin;
  return w;
}

}  // namespace

LocalityVerdict verify_locality(const CellSet& F, int steps, const CellSet& boundary, int trials,
                                std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_locality: trials must be >= 1");
  if (steps < 1) throw std::invalid_argument("verify_locality: steps must be >= 1");
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  const Window w = window_around(F, boundary, steps + 2);

  for (int trial = 0; trial < trials; ++trial) {
    CellSet a, b;
    for (long x = w.x0; x <= w.x1; ++x) {
      for (long y = w.y0; y <= w.y1; ++y) {
        const Cell c{x, y};
        const bool fixed = F.count(c) || boundary.count(c);
        if (fixed) {
          if (coin(rng)) {
            a.insert(c);
            b.insert(c);
          }
        } else {
          if (coin(rng)) a.insert(c);
          if (coin(rng)) b.insert(c);
        }
      }
    }
    if (restrict_state(life_step_n(a, steps), F) != restrict_state(life_step_n(b, steps), F)) {
      return {false, trial, std::move(a), std::move(b)};
    }
  }
  return {};
}

LocalityVerdict verify_locality(const CellSet& F, int k, int trials, std::uint64_t seed) {
  const int steps = std::max(k, 1);
  return verify_locality(F, steps, life_boundary(F, k), trials, seed);
}

CellSet parse_cells(std::istream& in) {
  CellSet cells;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long x, y;
    if (ls >> x >> y) cells.insert({x, y});
  }
  return cells;
}

CellSet load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pattern file: " + path);
  return parse_cells(in);
}

void write_pattern(std::ostream& out, const CellSet& state) {
  for (const Cell& c : state) out << c.first << ' ' << c.second << '\n';
}

}  // namespace interactivity::ulenv
