#include "rabi/fss.hpp"

#include <cmath>
#include <stdexcept>

#include "rabi/parallel.hpp"

namespace rabi {

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw std::invalid_argument("log_spaced: need 0 < lo <= hi, n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.back() = hi;
  return out;
}

FssData generate_fss(const FssConfig& cfg) {
  if (cfg.etas.size() < 3) throw std::invalid_argument("generate_fss: need >= 3 eta values");
  if (!(cfg.gc > 0.0)) throw std::invalid_argument("generate_fss: gc must be > 0");
  for (double t : cfg.ts) {
    if (!(t > 0.0) || !(t < 1.0)) throw std::invalid_argument("generate_fss: t must lie in (0, 1)");
  }
  cfg.opts.validate();

  // Task layout per eta: critical point, then (below, above) for each t.
  const std::size_t per_eta = 1 + 2 * cfg.ts.size();
  struct Task {
    double eta;
    double gtilde;
  };
  std::vector<Task> tasks;
  tasks.reserve(per_eta * cfg.etas.size());
  for (double eta : cfg.etas) {
    tasks.push_back({eta, cfg.gc});
    for (double t : cfg.ts) {
      tasks.push_back({eta, cfg.gc * (1.0 - t)});
      tasks.push_back({eta, cfg.gc * (1.0 + t)});
    }
  }

  const auto results = parallel_map(tasks.size(), cfg.jobs, [&](std::size_t i) {
    return ground_spectrum(params_from_rescaled(tasks[i].gtilde, cfg.tau, cfg.kappa, tasks[i].eta, cfg.omega),
                           cfg.opts);
  });

  FssData out;
  out.n0.observable = Observable::N0;
  out.gap.observable = Observable::Gap;
  out.n0.gc = out.gap.gc = cfg.gc;
  for (std::size_t e = 0; e < cfg.etas.size(); ++e) {
    const std::size_t base = e * per_eta;
    const double eta = cfg.etas[e];
    const SpectrumResult& c = results[base];
    out.critical.push_back({eta, c.n0, c.gap, c.converged});
    if (!c.converged) ++out.unconverged;
    for (std::size_t k = 0; k < cfg.ts.size(); ++k) {
      const std::size_t lo = base + 1 + 2 * k;
      for (std::size_t i : {lo, lo + 1}) {
        const SpectrumResult& r = results[i];
        if (!r.converged) ++out.unconverged;
        out.n0.rows.push_back({eta, tasks[i].gtilde, r.n0});
      }
      out.gap.rows.push_back({eta, tasks[lo].gtilde, results[lo].gap});
    }
  }
  return out;
}

std::vector<std::pair<double, double>> critical_series(const std::vector<CriticalPoint>& pts, Observable o) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pts.size());
  for (const CriticalPoint& p : pts) out.emplace_back(p.eta, o == Observable::N0 ? p.n0 : p.gap);
  return out;
}

}  // namespace rabi
