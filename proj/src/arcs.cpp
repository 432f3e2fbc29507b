#include "nuspec/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nuspec {

ArcSet ArcSet::ball(double center, double radius) {
  ArcSet s;
  s.add_arc(center - radius, 2.0 * radius);
  return s;
}

ArcSet ArcSet::full() {
  ArcSet s;
  s.full_ = true;
  return s;
}

void ArcSet::add_arc(double start, double length) {
  push_arc(start, length);
  normalize();
}

void ArcSet::push_arc(double start, double length) {
  if (full_ || !(length > 0.0)) return;
  if (length >= 1.0) {
    full_ = true;
    intervals_.clear();
    return;
  }
  start = wrap_unit(start);
  const double end = start + length;
  if (end <= 1.0) {
    intervals_.emplace_back(start, end);
  } else {
    intervals_.emplace_back(start, 1.0);
    intervals_.emplace_back(0.0, end - 1.0);
  }
}

void ArcSet::normalize() {
  if (full_) return;
  std::sort(intervals_.begin(), intervals_.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals_) {
    if (!merged.empty() && iv.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  intervals_ = std::move(merged);
  if (intervals_.size() == 1 && intervals_[0].first <= 0.0 && intervals_[0].second >= 1.0) {
    full_ = true;
    intervals_.clear();
  }
}

ArcSet ArcSet::image(const CircleMap& f) const {
  std::vector<std::pair<double, double>> source = intervals_;
  if (full_) source = {{0.0, 1.0}};
  const std::vector<double> turns = f.turning_points();
  ArcSet out;
  for (const auto& [a, b] : source) {
    double u = a;
    auto piece = [&](double lo_x, double hi_x) {
      const double fa = f.lift(lo_x), fb = f.lift(hi_x);
      out.push_arc(std::min(fa, fb), std::fabs(fb - fa));
    };
    for (double t : turns) {
      if (t > u && t < b) {
        piece(u, t);
        u = t;
      }
    }
    piece(u, b);
    if (out.full_) break;
  }
  out.normalize();
  return out;
}

bool ArcSet::intersects(const ArcSet& other) const {
  if (empty() || other.empty()) return false;
  if (full_ || other.full_) return true;
  std::size_t i = 0, j = 0;
  const auto& A = intervals_;
  const auto& B = other.intervals_;
  while (i < A.size() && j < B.size()) {
    if (std::min(A[i].second, B[j].second) > std::max(A[i].first, B[j].first)) return true;
    (A[i].second < B[j].second ? i : j)++;
  }
  return false;
}

bool ArcSet::contains(double x) const {
  if (full_) return true;
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), std::make_pair(x, 2.0));
  if (it == intervals_.begin()) return false;
  --it;
  return x > it->first && x < it->second;
}

double ArcSet::measure() const {
  if (full_) return 1.0;
  double m = 0.0;
  for (const auto& [a, b] : intervals_) m += b - a;
  return m;
}

ArcSet ArcSet::united(const ArcSet& other) const {
  if (full_ || other.full_) return full();
  ArcSet out = *this;
  out.intervals_.insert(out.intervals_.end(), other.intervals_.begin(), other.intervals_.end());
  out.normalize();
  return out;
}

GridSet::GridSet(std::size_t cells, std::vector<std::pair<std::size_t, std::size_t>> runs)
    : cells_(cells), runs_(std::move(runs)) {
  if (cells_ == 0) throw std::invalid_argument("grid needs at least one cell");
  std::sort(runs_.begin(), runs_.end());
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& r : runs_) {
    if (!merged.empty() && r.first <= merged.back().second + 1)
      merged.back().second = std::max(merged.back().second, r.second);
    else
      merged.push_back(r);
  }
  runs_ = std::move(merged);
}

std::size_t GridSet::cells_for(double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  return static_cast<std::size_t>(std::ceil(1.0 / resolution - 1e-9));
}

GridSet GridSet::from_arcs(const ArcSet& arcs, std::size_t cells) {
  if (arcs.is_full()) return GridSet(cells, {{0, cells - 1}});
  const double n = static_cast<double>(cells);
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (const auto& [a, b] : arcs.intervals()) {
    // Cell i has center (i + 1/2) / n; keep centers strictly inside (a, b).
    const double first = std::floor(a * n - 0.5) + 1.0;
    const double last = std::ceil(b * n - 0.5) - 1.0;
    if (first > last) continue;
    const double lo = std::max(first, 0.0), hi = std::min(last, n - 1.0);
    if (lo <= hi) runs.emplace_back(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
  }
  return GridSet(cells, std::move(runs));
}

bool GridSet::is_full() const { return runs_.size() == 1 && runs_[0].first == 0 && runs_[0].second + 1 == cells_; }

bool GridSet::contains_cell(std::size_t i) const {
  auto it = std::upper_bound(runs_.begin(), runs_.end(), std::make_pair(i, static_cast<std::size_t>(-1)));
  if (it == runs_.begin()) return false;
  --it;
  return i >= it->first && i <= it->second;
}

bool GridSet::intersects(const GridSet& other) const {
  std::size_t i = 0, j = 0;
  while (i < runs_.size() && j < other.runs_.size()) {
    if (std::max(runs_[i].first, other.runs_[j].first) <= std::min(runs_[i].second, other.runs_[j].second)) return true;
    (runs_[i].second < other.runs_[j].second ? i : j)++;
  }
  return false;
}

GridSet GridSet::united(const GridSet& other) const {
  auto runs = runs_;
  runs.insert(runs.end(), other.runs_.begin(), other.runs_.end());
  return GridSet(cells_, std::move(runs));
}

ArcSet GridSet::as_arcs() const {
  if (is_full()) return ArcSet::full();
  ArcSet out;
  const double n = static_cast<double>(cells_);
  for (const auto& [a, b] : runs_) out.push_arc(static_cast<double>(a) / n, static_cast<double>(b - a + 1) / n);
  out.normalize();
  return out;
}

GridSet GridSet::image(const CircleMap& f) const { return from_arcs(as_arcs().image(f), cells_); }

}  // namespace nuspec
