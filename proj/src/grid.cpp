#include "foldlab/grid.hpp"

#include "foldlab/errors.hpp"

namespace foldlab {

bool Box::contains(std::span<const double> p, double slack) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
  return true;
}

bool Box::contains(const Box& inner, double slack) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (inner.lo[i] < lo[i] - slack || inner.hi[i] > hi[i] + slack) return false;
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

Box Box::cube(std::size_t dims, double l, double h) { return Box{std::vector<double>(dims, l), std::vector<double>(dims, h)}; }

Grid::Grid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw ConfigError("grid needs at least one axis");
  size_ = 1;
  weight_ = 1.0;
  for (const auto& a : axes_) {
    if (a.count == 0) throw ConfigError("grid axis count must be positive");
    if (!(a.hi > a.lo)) throw ConfigError("grid axis must have hi > lo");
    size_ *= a.count;
    weight_ *= a.spacing();
  }
}

Grid::Grid(const Box& box, std::span<const std::size_t> counts) {
  if (counts.size() != box.dims()) throw ConfigError("grid counts do not match box dimension");
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < box.dims(); ++i) axes.push_back({box.lo[i], box.hi[i], counts[i]});
  *this = Grid(std::move(axes));
}

Box Grid::box() const {
  Box b;
  for (const auto& a : axes_) {
    b.lo.push_back(a.lo);
    b.hi.push_back(a.hi);
  }
  return b;
}

void Grid::node(std::size_t index, std::span<double> out) const {
  for (std::size_t a = axes_.size(); a-- > 0;) {
    const std::size_t c = axes_[a].count;
    out[a] = axes_[a].node(index % c);
    index /= c;
  }
}

std::vector<double> Grid::node(std::size_t index) const {
  std::vector<double> out(dims());
  node(index, out);
  return out;
}

Grid Grid::refined() const {
  auto axes = axes_;
  for (auto& a : axes) a.count *= 2;
  return Grid(std::move(axes));
}

}  // namespace foldlab
