#include "asymgame/measures.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "asymgame/csv.hpp"
#include "asymgame/errors.hpp"

namespace asymgame {
namespace {

constexpr double kMassTolerance = 1e-12;

// Normalization drift above this is a bug, below it is float noise.
void check_probability(std::vector<double>& w, const char* what) {
  double total = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument(std::string(what) + ": negative or non-finite weight");
    }
    total += x;
  }
  const double drift = std::abs(total - 1.0);
  if (drift > kMassTolerance) {
    throw InvalidArgument(std::string(what) + ": weights sum to " +
                          format_real(total) + ", not 1");
  }
  if (drift > 0.0) {
    for (double& x : w) x /= total;
  }
}

}  // namespace

ParticleMeasure::ParticleMeasure(std::vector<Point> points,
                                 std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty() || points_.size() != weights_.size()) {
    throw InvalidArgument("measure needs equally many (>= 1) points and weights");
  }
  dim_ = static_cast<int>(points_.front().size());
  if (dim_ < 1) throw InvalidArgument("measure points must have dimension >= 1");
  for (const auto& p : points_) {
    if (static_cast<int>(p.size()) != dim_) {
      throw InvalidArgument("measure points have mixed dimensions");
    }
    for (double c : p) {
      if (!std::isfinite(c)) throw InvalidArgument("non-finite measure point");
    }
  }
  check_probability(weights_, "measure");
}

ParticleMeasure ParticleMeasure::uniform(std::vector<Point> points) {
  const std::size_t n = points.size();
  if (n == 0) throw InvalidArgument("uniform measure on an empty set");
  return ParticleMeasure(std::move(points),
                         std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ParticleMeasure ParticleMeasure::dirac(Point x) {
  return ParticleMeasure({std::move(x)}, {1.0});
}

ParticleMeasure pushforward(const ParticleMeasure& mu, const PointMap& map) {
  std::vector<Point> out;
  out.reserve(mu.size());
  std::size_t out_dim = 0;
  for (const auto& x : mu.points()) {
    out.push_back(map(x));
    if (out.size() == 1) {
      out_dim = out.back().size();
    } else if (out.back().size() != out_dim) {
      throw InvalidArgument("pushforward map returned inconsistent dimensions");
    }
  }
  if (out_dim == 0) throw InvalidArgument("pushforward map returned an empty point");
  return ParticleMeasure(std::move(out), mu.weights());
}

ParticleMeasure split(const ParticleMeasure& mu,
                      const std::vector<std::vector<Branch>>& fanout) {
  if (fanout.size() != mu.size()) {
    throw InvalidArgument("split needs one branch list per atom");
  }
  std::vector<Point> points;
  std::vector<double> weights;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& branches = fanout[i];
    if (branches.empty()) throw InvalidArgument("split: atom with no branches");
    double total = 0.0;
    for (const auto& b : branches) {
      if (!std::isfinite(b.weight) || b.weight < 0.0) {
        throw InvalidArgument("split: negative branch weight");
      }
      total += b.weight;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw InvalidArgument("split: branch weights of atom " + std::to_string(i) +
                            " sum to " + format_real(total));
    }
    for (const auto& b : branches) {
      points.push_back(b.point);
      weights.push_back(mu.weight(i) * b.weight / total);
    }
  }
  return ParticleMeasure(std::move(points), std::move(weights));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

ParticleMeasure prune(const ParticleMeasure& mu, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("prune tolerance must be >= 0");
  std::vector<Point> pts = mu.points();
  std::vector<double> w = mu.weights();
  const double tol2 = tol * tol;
  while (pts.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double d2 = squared_distance(pts[i], pts[j]);
        if (d2 < best) {
          best = d2;
          bi = i;
          bj = j;
        }
      }
    }
    if (best > tol2) break;
    const double total = w[bi] + w[bj];
    if (total > 0.0) {
      for (std::size_t k = 0; k < pts[bi].size(); ++k) {
        // Incremental form keeps exact duplicates bit-identical.
        pts[bi][k] += (w[bj] / total) * (pts[bj][k] - pts[bi][k]);
      }
    }
    w[bi] = total;
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(bj));
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  // Rebuilding would renormalize again and shift weights by an ulp.
  if (pts.size() == mu.size()) return mu;
  return ParticleMeasure(std::move(pts), std::move(w));
}

double second_moment(const ParticleMeasure& mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double n2 = 0.0;
    for (double c : mu.point(i)) n2 += c * c;
    s += mu.weight(i) * n2;
  }
  return s;
}

void write_measure_csv(std::ostream& out, const ParticleMeasure& mu) {
  out << "w";
  for (int k = 1; k <= mu.dim(); ++k) out << ",x_" << k;
  out << '\n';
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out << format_real(mu.weight(i));
    for (double c : mu.point(i)) out << ',' << format_real(c);
    out << '\n';
  }
}

ParticleMeasure read_measure_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("measure CSV: missing header");
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "w") {
    throw InvalidArgument("measure CSV: header must be w,x_1,...,x_d");
  }
  const std::size_t d = header.size() - 1;
  std::vector<Point> pts;
  std::vector<double> w;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != d + 1) {
      throw InvalidArgument("measure CSV: row " + std::to_string(row) + " has " +
                            std::to_string(f.size()) + " fields, expected " +
                            std::to_string(d + 1));
    }
    const std::string where = "measure CSV row " + std::to_string(row);
    w.push_back(parse_real(f[0], where));
    Point p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = parse_real(f[k + 1], where);
    pts.push_back(std::move(p));
  }
  return ParticleMeasure(std::move(pts), std::move(w));
}

ParticleMeasure read_measure_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open measure file '" + path + "'");
  return read_measure_csv(in);
}

}  // namespace asymgame
