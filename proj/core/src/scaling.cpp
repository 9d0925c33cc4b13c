#include "rabi/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

// pchip.hpp calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "rabi/parallel.hpp"

namespace rabi {

const char* observable_name(Observable o) { return o == Observable::N0 ? "n0" : "gap"; }

namespace {

struct LogPoint {
  double x;
  double y;
};

// Monotone cubic reference through (x, y) pairs; duplicate abscissae are
// averaged. Falls back to linear interpolation below four nodes.
class Reference {
 public:
  explicit Reference(std::vector<LogPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const LogPoint& a, const LogPoint& b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    for (std::size_t i = 0; i < pts.size();) {
      std::size_t j = i;
      double sum = 0.0;
      while (j < pts.size() && pts[j].x == pts[i].x) sum += pts[j++].y;
      xs_.push_back(pts[i].x);
      ys_.push_back(sum / static_cast<double>(j - i));
      i = j;
    }
    if (xs_.size() >= 4) {
      spline_.emplace(std::vector<double>(xs_), std::vector<double>(ys_));
    }
  }

  bool covers(double x) const { return xs_.size() >= 2 && x >= xs_.front() && x <= xs_.back(); }

  double operator()(double x) const {
    if (spline_) return (*spline_)(x);
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xs_.begin());
    k = std::clamp<std::size_t>(k, 1, xs_.size() - 1);
    const double w = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
    return ys_[k - 1] + w * (ys_[k] - ys_[k - 1]);
  }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::optional<boost::math::interpolators::pchip<std::vector<double>>> spline_;
};

}  // namespace

CollapseResult collapse(const FssDataset& data, double beta, double nu) {
  if (!(data.gc > 0.0)) throw std::invalid_argument("collapse: gc must be > 0");
  if (!std::isfinite(beta) || !std::isfinite(nu)) throw std::invalid_argument("collapse: non-finite exponent");

  CollapseResult out;
  out.beta = beta;
  out.nu = nu;

  // (side, eta) -> log-scaled points
  std::map<std::pair<int, double>, std::vector<LogPoint>> curves;
  std::set<double> etas;
  for (const FssRow& r : data.rows) {
    const double t = std::abs(1.0 - r.gtilde / data.gc);
    if (t == 0.0) {
      ++out.excluded_critical;
      continue;
    }
    if (!(r.value > 0.0)) {
      ++out.excluded_nonpositive;
      continue;
    }
    if (t < data.t_min || t > data.t_max) {
      ++out.excluded_window;
      continue;
    }
    if (!(r.eta > 0.0)) throw std::invalid_argument("collapse: eta must be > 0");
    const int side = r.gtilde < data.gc ? -1 : 1;
    const double lx = std::log(t) + nu * std::log(r.eta);
    const double ly = std::log(r.value) - beta * std::log(t);
    curves[{side, r.eta}].push_back({lx, ly});
    etas.insert(r.eta);
  }
  if (etas.size() < 3) throw std::invalid_argument("collapse: need >= 3 distinct eta values");

  double mean = 0.0;
  std::size_t count = 0;
  for (const auto& [key, pts] : curves) {
    for (const LogPoint& p : pts) {
      mean += p.y;
      ++count;
    }
  }
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (const auto& [key, pts] : curves) {
    for (const LogPoint& p : pts) var += (p.y - mean) * (p.y - mean);
  }
  var /= static_cast<double>(count);

  double sq = 0.0;
  int compared = 0;
  for (const auto& [key, pts] : curves) {
    std::vector<LogPoint> others;
    for (const auto& [k2, p2] : curves) {
      if (k2.first == key.first && k2 != key) others.insert(others.end(), p2.begin(), p2.end());
    }
    if (others.size() < 2) continue;
    const Reference ref(std::move(others));
    for (const LogPoint& p : pts) {
      if (!ref.covers(p.x)) continue;
      const double d = p.y - ref(p.x);
      sq += d * d;
      ++compared;
    }
  }
  out.compared_points = compared;
  if (compared == 0) {
    out.residual = std::numeric_limits<double>::infinity();
  } else {
    const double msd = sq / compared;
    out.residual = var > 0.0 ? msd / var : msd;
  }

  for (const auto& [key, pts] : curves) {
    ScaledCurve c;
    c.side = key.first;
    c.eta = key.second;
    std::vector<LogPoint> sorted = pts;
    std::sort(sorted.begin(), sorted.end(), [](const LogPoint& a, const LogPoint& b) { return a.x < b.x; });
    for (const LogPoint& p : sorted) {
      c.x.push_back(std::exp(p.x));
      c.y.push_back(std::exp(p.y));
    }
    out.scaled_curves.push_back(std::move(c));
  }
  return out;
}

PowerLawFit fit_critical_powerlaw(const std::vector<std::pair<double, double>>& points) {
  std::set<double> sizes;
  for (const auto& [eta, v] : points) {
    if (!(eta > 0.0)) throw std::invalid_argument("fit_critical_powerlaw: eta must be > 0");
    if (!(v > 0.0)) throw std::invalid_argument("fit_critical_powerlaw: values must be > 0");
    sizes.insert(eta);
  }
  if (sizes.size() < 3) throw std::invalid_argument("fit_critical_powerlaw: need >= 3 distinct sizes");

  const auto n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [eta, v] : points) {
    mx += std::log(eta);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [eta, v] : points) {
    const double dx = std::log(eta) - mx;
    const double dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (const auto& [eta, v] : points) {
    const double r = std::log(v) - (intercept + slope * std::log(eta));
    ssr += r * r;
  }

  PowerLawFit fit;
  fit.exponent = -slope;
  fit.prefactor = std::exp(intercept);
  fit.points = static_cast<int>(points.size());
  fit.std_error = points.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  fit.r2 = syy > 0.0 ? std::max(0.0, 1.0 - ssr / syy) : 1.0;
  return fit;
}

ExponentScan scan_exponents(const FssDataset& data, const std::vector<double>& beta_grid,
                            const std::vector<double>& nu_grid, int jobs) {
  if (beta_grid.empty() || nu_grid.empty()) throw std::invalid_argument("scan_exponents: empty grid");
  ExponentScan s;
  s.beta_grid = beta_grid;
  s.nu_grid = nu_grid;
  const std::size_t nn = nu_grid.size();
  s.surface = parallel_map(beta_grid.size() * nn, jobs, [&](std::size_t k) {
    return collapse(data, beta_grid[k / nn], nu_grid[k % nn]).residual;
  });

  std::size_t best = 0;
  auto better = [&](std::size_t a, std::size_t b) {
    const double ra = s.surface[a], rb = s.surface[b];
    if (ra != rb) return ra < rb;
    const double na = nu_grid[a % nn], nb = nu_grid[b % nn];
    if (na != nb) return na < nb;
    return beta_grid[a / nn] < beta_grid[b / nn];
  };
  for (std::size_t k = 1; k < s.surface.size(); ++k) {
    if (better(k, best)) best = k;
  }
  s.beta = beta_grid[best / nn];
  s.nu = nu_grid[best % nn];
  s.residual = s.surface[best];
  return s;
}

}  // namespace rabi
