#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace asymgame {

using Point = std::vector<double>;

// Finitely supported probability measure on R^d: a weighted point cloud.
//
// Construction validates the invariants: at least one atom, all points of the
// same dimension, nonnegative weights summing to one. A total drift of at most
// 1e-12 is renormalized away; anything larger is rejected. Values are
// immutable once built.
class ParticleMeasure {
 public:
  ParticleMeasure(std::vector<Point> points, std::vector<double> weights);

  // Uniform weights over the given points.
  static ParticleMeasure uniform(std::vector<Point> points);
  static ParticleMeasure dirac(Point x);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  friend bool operator==(const ParticleMeasure&, const ParticleMeasure&) = default;

 private:
  std::vector<Point> points_;
  std::vector<double> weights_;
  int dim_ = 0;
};

using PointMap = std::function<Point(const Point&)>;

// One (branch weight, branch point) pair of a split.
struct Branch {
  double weight;
  Point point;
};

ParticleMeasure pushforward(const ParticleMeasure& mu, const PointMap& map);

// Replaces atom i by its branches, with masses w_i * branch weight. Each
// atom's branch weights must form a probability vector.
ParticleMeasure split(const ParticleMeasure& mu,
                      const std::vector<std::vector<Branch>>& fanout);

// Greedily merges atoms closer than tol (Euclidean) into their weighted
// barycenter, nearest pair first, ties broken by index order.
ParticleMeasure prune(const ParticleMeasure& mu, double tol);

double second_moment(const ParticleMeasure& mu);

double squared_distance(std::span<const double> a, std::span<const double> b);

// CSV with header "w,x_1,...,x_d" and one row per atom.
void write_measure_csv(std::ostream& out, const ParticleMeasure& mu);
ParticleMeasure read_measure_csv(std::istream& in);
ParticleMeasure read_measure_csv_file(const std::string& path);

}  // namespace asymgame
