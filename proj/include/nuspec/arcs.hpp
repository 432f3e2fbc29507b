#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "nuspec/map_catalog.hpp"

namespace nuspec {

// Finite union of open arcs of S^1, stored as disjoint sorted intervals of [0,1).
class ArcSet {
 public:
  static ArcSet ball(double center, double radius);
  static ArcSet full();

  bool is_full() const { return full_; }
  bool empty() const { return !full_ && intervals_.empty(); }
  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }

  // Exact image under the lift, splitting at turning points.
  ArcSet image(const CircleMap& f) const;
  // True when the intersection has positive length.
  bool intersects(const ArcSet& other) const;
  bool contains(double x) const;
  double measure() const;
  ArcSet united(const ArcSet& other) const;

  // Adds the arc [start, start + length), wrapping past 1.
  void add_arc(double start, double length);

 private:
  friend class GridSet;
  void push_arc(double start, double length);  // no merge; call normalize() after
  void normalize();

  bool full_ = false;
  std::vector<std::pair<double, double>> intervals_;
};

// Cells of a uniform grid on S^1, stored as sorted disjoint runs [first, last].
// A cell is a member when its center lies in the tracked set.
class GridSet {
 public:
  GridSet() : cells_(1) {}
  GridSet(std::size_t cells, std::vector<std::pair<std::size_t, std::size_t>> runs);

  static GridSet from_arcs(const ArcSet& arcs, std::size_t cells);
  static std::size_t cells_for(double resolution);

  std::size_t cells() const { return cells_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& runs() const { return runs_; }
  bool is_full() const;
  bool empty() const { return runs_.empty(); }
  bool contains_cell(std::size_t i) const;
  bool intersects(const GridSet& other) const;
  GridSet united(const GridSet& other) const;

  // Image of the union of member cells, re-sampled at cell centers.
  GridSet image(const CircleMap& f) const;
  ArcSet as_arcs() const;

 private:
  std::size_t cells_;
  std::vector<std::pair<std::size_t, std::size_t>> runs_;
};

}  // namespace nuspec
