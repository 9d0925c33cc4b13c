#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "output.hpp"
#include "presets.hpp"
#include "rabi/criticality.hpp"
#include "rabi/effective.hpp"
#include "rabi/fss.hpp"
#include "rabi/scaling.hpp"
#include "rabi/spectra.hpp"
#include "rabi/verify.hpp"

#ifndef RABI_VERSION
#define RABI_VERSION "0.0.0"
#endif

namespace rabi::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// More than this fraction of unconverged points is a numerical failure.
constexpr double kUnconvergedLimit = 0.2;

struct Common {
  double omega = 1.0;
  int n_max_ceiling = 16384;
  double rel_tol = 1e-6;
  double tail_tol = 1e-8;
  int jobs = 1;
  std::string output;
  std::string format = "csv";
  std::string preset;
  std::string solver = "auto";
};

struct Args {
  Common common;
  double tau = 0.0;
  double kappa = 0.0;
  std::vector<double> gtildes;
  std::string gtilde_range;
  std::string tau_range;
  std::vector<double> etas;
  bool include_invalid = false;

  // fss
  double t_min = 1e-3;
  double t_max = 1e-1;
  int t_count = 13;
  double beta_n0 = NAN;
  double beta_gap = NAN;
  double nu = NAN;
  bool scan = false;
  std::string beta_grid = "0.25:2:0.05";
  std::string nu_grid = "0.25:1.5:0.05";
  bool synthetic = false;
  double planted_beta = 1.0;
  double planted_nu = 2.0 / 3.0;

  // verify
  bool inject_fault = false;

  // Same flag name on several subcommands; only the parsed one has a count.
  std::multimap<std::string, CLI::Option*> opts;
  void track(const std::string& name, CLI::Option* o) { opts.emplace(name, o); }
  bool given(const std::string& name) const {
    const auto [lo, hi] = opts.equal_range(name);
    for (auto it = lo; it != hi; ++it) {
      if (it->second->count() > 0) return true;
    }
    return false;
  }
};

// RABI_CRITIC_JOBS when set (0 when it does not parse, so validation rejects it),
// otherwise the hardware thread count.
int default_jobs() {
  if (const char* env = std::getenv("RABI_CRITIC_JOBS")) {
    int v = 0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    return ec == std::errc() && ptr == end ? v : 0;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void add_common(CLI::App* sub, Args& a, bool solver_opts) {
  Common& c = a.common;
  a.track("omega", sub->add_option("--omega", c.omega, "cavity frequency")->check(CLI::PositiveNumber));
  if (solver_opts) {
    sub->add_option("--n-max-ceiling", c.n_max_ceiling, "largest Fock cutoff tried")->check(CLI::PositiveNumber);
    sub->add_option("--rel-tol", c.rel_tol, "convergence tolerance under cutoff doubling")->check(CLI::PositiveNumber);
    sub->add_option("--tail-tol", c.tail_tol, "ground-state weight allowed in the top 10% of levels")
        ->check(CLI::PositiveNumber);
    sub->add_option("--solver", c.solver, "eigensolver")->check(CLI::IsMember({"auto", "direct", "lanczos"}));
  }
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("-o,--output", c.output, "output file (stdout when omitted)");
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--preset", c.preset, "named parameter set");
}

void add_point(CLI::App* sub, Args& a) {
  a.track("tau", sub->add_option("--tau", a.tau, "anisotropy"));
  a.track("kappa", sub->add_option("--kappa", a.kappa, "A^2 strength ratio")->check(CLI::NonNegativeNumber));
}

void add_gtilde(CLI::App* sub, Args& a) {
  auto* list = sub->add_option("--gtilde", a.gtildes, "rescaled couplings (comma separated)")->delimiter(',');
  auto* range = sub->add_option("--gtilde-range", a.gtilde_range, "lo:hi:step");
  list->excludes(range);
  a.track("gtilde", list);
  a.track("gtilde-range", range);
}

void add_etas(CLI::App* sub, Args& a) {
  a.track("eta", sub->add_option("--eta", a.etas, "frequency ratios (comma separated)")
                      ->delimiter(',')
                      ->check(CLI::PositiveNumber));
}

const Preset* resolve_preset(Args& a, const std::string& command) {
  if (a.common.preset.empty()) return nullptr;
  const Preset* p = find_preset(a.common.preset);
  if (!p) {
    std::string names;
    for (const Preset& q : presets()) names += " " + q.name;
    throw UsageError("unknown preset '" + a.common.preset + "' (known:" + names + ")");
  }
  if (p->command != command) {
    throw UsageError("preset '" + p->name + "' belongs to the " + p->command + " subcommand");
  }
  if (p->tau && !a.given("tau")) a.tau = *p->tau;
  if (p->kappa && !a.given("kappa")) a.kappa = *p->kappa;
  if (!p->etas.empty() && !a.given("eta")) a.etas = p->etas;
  if (p->tau_grid && !a.given("tau-range")) a.tau_range = to_string(*p->tau_grid);
  if (p->gtilde_grid && !a.given("gtilde") && !a.given("gtilde-range")) a.gtilde_range = to_string(*p->gtilde_grid);
  return p;
}

void require(const Args& a, const std::string& name, const Preset* p, bool from_preset) {
  if (!a.given(name) && !(p && from_preset)) throw UsageError("--" + name + " is required");
}

std::vector<double> gtilde_values(const Args& a) {
  std::vector<double> g = a.gtilde_range.empty() ? a.gtildes : expand(parse_grid(a.gtilde_range));
  if (g.empty()) throw UsageError("give --gtilde or --gtilde-range");
  for (double x : g) {
    if (!std::isfinite(x) || x < 0.0) throw UsageError("gtilde values must be finite and >= 0");
  }
  return g;
}

SolverOptions solver_options(const Common& c) {
  SolverOptions o;
  o.n_max_ceiling = c.n_max_ceiling;
  o.n_max_initial = std::min(o.n_max_initial, c.n_max_ceiling);
  o.rel_tol = c.rel_tol;
  o.tail_tol = c.tail_tol;
  o.solver = c.solver == "direct" ? SolverKind::Direct : c.solver == "lanczos" ? SolverKind::Lanczos : SolverKind::Auto;
  o.validate();
  return o;
}

Format format_of(const Common& c) { return c.format == "json" ? Format::Json : Format::Csv; }

json solver_json(const SolverOptions& o) {
  return {{"n_max_initial", o.n_max_initial}, {"n_max_ceiling", o.n_max_ceiling}, {"rel_tol", o.rel_tol},
          {"tail_tol", o.tail_tol},           {"n_eigen", o.n_eigen},             {"solver", solver_name(o.solver)},
          {"adaptive_start", o.adaptive_start}};
}

json frame_convention() {
  return {{"headline", "b"},
          {"x", "(c + c^+)/sqrt(2)"},
          {"p", "i(c^+ - c)/sqrt(2)"},
          {"relation", "x2_b = gamma x2_a, p2_b = p2_a / gamma, gamma = (mu + nu)^2 = sqrt(1 + kappa gtilde^2)"}};
}

json derivative_convention(double omega, const std::vector<double>& etas) {
  json factors = json::array();
  for (double eta : etas) factors.push_back({{"eta", eta}, {"dg_dgtilde", coupling_chain_factor(omega, eta)}});
  return {{"variable", "g"},
          {"g_from_gtilde", "g = gtilde sqrt(omega delta) / 2"},
          {"stencil", "central inside, one-sided at the ends (cells left empty)"},
          {"chain_factors", factors}};
}

json base_meta(const std::string& command, const Args& a) {
  json m;
  m["tool"] = "rabi-critic";
  m["version"] = RABI_VERSION;
  m["command"] = command;
  m["format"] = a.common.format;
  m["preset"] = a.common.preset.empty() ? json(nullptr) : json(a.common.preset);
  m["conventions"] = {{"quadrature_frame", frame_convention()},
                      {"basis", "index = 2n + s, s = 0 for the lower qubit state"},
                      {"parity", "P = -sigma_z (-1)^(a^+ a)"}};
  return m;
}

std::filesystem::path overlay_path(const std::string& output) {
  std::filesystem::path p(output);
  std::filesystem::path name = p.stem();
  name += ".boundaries";
  name += p.extension();
  return p.parent_path() / name;
}

Table boundary_table(const std::vector<BoundaryCurve>& curves, bool include_invalid) {
  Table t{{"kind", "kappa", "tau", "gtilde", "valid"}, {}};
  for (const BoundaryCurve& c : curves) {
    for (const BoundarySample& s : c.samples) {
      if (!s.valid && !include_invalid) continue;
      t.add({std::string(boundary_name(c.kind)), c.kappa, s.tau, s.gtilde, std::int64_t{s.valid ? 1 : 0}});
    }
  }
  return t;
}

json validity_json(const std::vector<BoundaryCurve>& curves) {
  json v = json::object();
  for (const BoundaryCurve& c : curves) v[boundary_name(c.kind)] = c.validity;
  return v;
}

std::size_t count_of(const GridSpec& g) { return expand(g).size(); }

// ---------------------------------------------------------------- commands

int cmd_boundaries(Args& a, std::ostream& out, std::ostream&) {
  const Preset* p = resolve_preset(a, "boundaries");
  require(a, "kappa", p, false);
  if (a.tau_range.empty()) throw UsageError("--tau-range is required");
  const GridSpec g = parse_grid(a.tau_range);
  const auto n = static_cast<int>(count_of(g));
  if (n < 2) throw UsageError("--tau-range needs at least 2 points");
  const auto curves = boundary_curves(a.kappa, {g.lo, g.hi}, n);

  json meta = base_meta("boundaries", a);
  meta["config"] = {{"kappa", a.kappa}, {"tau_range", a.tau_range}, {"include_invalid", a.include_invalid}};
  meta["validity"] = validity_json(curves);
  const Table t = boundary_table(curves, a.include_invalid);
  meta["columns"] = t.columns;
  emit(a.common.output, render(t, format_of(a.common)), meta, out);
  return kOk;
}

int cmd_classify(Args& a, std::ostream& out, std::ostream&) {
  resolve_preset(a, "classify");
  require(a, "tau", nullptr, false);
  require(a, "kappa", nullptr, false);
  const auto gts = gtilde_values(a);
  Table t{{"tau", "kappa", "gtilde", "label", "phase", "boundary_proximity"}, {}};
  for (double g : gts) {
    const PhaseLabel l = classify(a.tau, a.kappa, g);
    t.add({a.tau, a.kappa, g, std::int64_t{static_cast<int>(l.phase)}, std::string(phase_name(l.phase)),
           l.boundary_proximity});
  }
  json meta = base_meta("classify", a);
  meta["config"] = {{"tau", a.tau}, {"kappa", a.kappa}, {"gtilde", gts}};
  meta["columns"] = t.columns;
  meta["labels"] = {{"0", "normal"}, {"1", "x_srp"}, {"2", "p_srp"}};
  emit(a.common.output, render(t, format_of(a.common)), meta, out);
  return kOk;
}

int cmd_phase_diagram(Args& a, std::ostream& out, std::ostream& err) {
  const Preset* p = resolve_preset(a, "phase-diagram");
  require(a, "kappa", p, p && p->kappa.has_value());
  if (a.tau_range.empty() || a.gtilde_range.empty()) throw UsageError("--tau-range and --gtilde-range are required");
  const GridSpec gt = parse_grid(a.tau_range);
  const GridSpec gg = parse_grid(a.gtilde_range);
  const auto nt = static_cast<int>(count_of(gt));
  const auto ng = static_cast<int>(count_of(gg));
  if (nt < 2 || ng < 2) throw UsageError("phase diagram resolution must be >= 2 on both axes");
  const PhaseGrid grid = phase_diagram_grid(a.kappa, {gt.lo, gt.hi}, {gg.lo, gg.hi}, nt, ng, a.common.jobs);

  Table t{{"gtilde", "tau", "label"}, {}};
  t.rows.reserve(grid.labels.size());
  for (std::size_t j = 0; j < grid.gtildes.size(); ++j) {
    for (std::size_t i = 0; i < grid.taus.size(); ++i) {
      t.add({grid.gtildes[j], grid.taus[i], std::int64_t{static_cast<int>(grid.at(i, j))}});
    }
  }
  json config = {{"kappa", a.kappa}, {"tau_range", a.tau_range}, {"gtilde_range", a.gtilde_range}};
  json meta = base_meta("phase-diagram", a);
  meta["config"] = config;
  meta["columns"] = t.columns;
  meta["layout"] = {{"order", "row-major, gtilde outer, tau inner"},
                    {"tau_count", grid.taus.size()},
                    {"gtilde_count", grid.gtildes.size()}};
  meta["labels"] = {{"0", "normal"}, {"1", "x_srp"}, {"2", "p_srp"}};
  meta["validity"] = validity_json(grid.boundaries);
  const Format f = format_of(a.common);
  if (!a.common.output.empty()) {
    const auto overlay = overlay_path(a.common.output);
    meta["boundary_overlay"] = overlay.filename().string();
  }
  emit(a.common.output, render(t, f), meta, out);

  if (!a.common.output.empty()) {
    const Table b = boundary_table(grid.boundaries, false);
    json bmeta = base_meta("phase-diagram", a);
    bmeta["config"] = config;
    bmeta["columns"] = b.columns;
    bmeta["role"] = "boundary overlay";
    bmeta["validity"] = validity_json(grid.boundaries);
    emit(overlay_path(a.common.output).string(), render(b, f), bmeta, out);
  } else {
    err << "note: boundary overlay is only written together with --output\n";
  }
  return kOk;
}

int check_convergence(std::size_t bad, std::size_t total, std::ostream& err) {
  if (bad == 0) return kOk;
  err << "warning: " << bad << " of " << total << " points did not converge\n";
  if (static_cast<double>(bad) > kUnconvergedLimit * static_cast<double>(total)) {
    err << "error: more than " << static_cast<int>(kUnconvergedLimit * 100) << "% of points unconverged\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_sweep(Args& a, std::ostream& out, std::ostream& err) {
  const Preset* p = resolve_preset(a, "sweep");
  require(a, "tau", p, p && p->tau.has_value());
  require(a, "kappa", p, p && p->kappa.has_value());
  if (a.etas.empty()) throw UsageError("--eta is required");
  const auto gts = gtilde_values(a);
  const SolverOptions opts = solver_options(a.common);

  Table t{{"eta", "gtilde", "e0", "e1", "gap", "x2_a", "p2_a", "x2_b", "p2_b", "n0", "ground_parity", "n_max_used",
           "converged", "d1_e0", "d2_e0"},
          {}};
  std::size_t bad = 0, total = 0;
  for (double eta : a.etas) {
    const Sweep s = sweep_coupling(a.tau, a.kappa, eta, a.common.omega, gts, opts, a.common.jobs);
    std::vector<DerivativeSample> d1, d2;
    if (s.points.size() >= 3) {
      try {
        d1 = energy_derivative(s, 1);
        d2 = energy_derivative(s, 2);
      } catch (const std::invalid_argument& e) {
        err << "warning: no derivatives for eta = " << format_double(eta) << ": " << e.what() << "\n";
        d1.clear();
        d2.clear();
      }
    }
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const SpectrumResult& r = s.points[i].result;
      auto deriv = [&](const std::vector<DerivativeSample>& d) -> Cell {
        if (d.empty() || d[i].one_sided) return std::monostate{};
        return d[i].value;
      };
      t.add({eta, s.points[i].gtilde, r.e0, r.e1, r.gap, r.x2_a, r.p2_a, r.x2_b, r.p2_b, r.n0,
             std::int64_t{r.ground_parity}, std::int64_t{r.n_max_used}, std::int64_t{r.converged ? 1 : 0},
             deriv(d1), deriv(d2)});
      ++total;
      if (!r.converged) ++bad;
    }
  }

  json meta = base_meta("sweep", a);
  meta["config"] = {{"tau", a.tau},         {"kappa", a.kappa}, {"omega", a.common.omega},
                    {"eta", a.etas},        {"gtilde", gts},    {"solver", solver_json(opts)}};
  meta["conventions"]["derivative"] = derivative_convention(a.common.omega, a.etas);
  meta["columns"] = t.columns;
  meta["unconverged"] = bad;
  emit(a.common.output, render(t, format_of(a.common)), meta, out);
  return check_convergence(bad, total, err);
}

// O = A eta^(-beta nu) (1 + t eta^nu)^beta = t^beta F(t eta^nu) with
// F(x) = A (1 + x)^beta / x^beta. Every size is sampled on one geometric
// ladder of scaled abscissae x, so curves share nodes and collapse exactly.
FssData synthetic_fss(const std::vector<double>& etas, const std::vector<double>& ts, double gc, double beta,
                      double nu) {
  const double amp = 1.5;
  const double t_min = ts.front(), t_max = ts.back();
  const double ratio = std::pow(t_max / t_min, 1.0 / static_cast<double>(ts.size() - 1));
  const double x0 = t_min * std::pow(*std::min_element(etas.begin(), etas.end()), nu);
  FssData d;
  d.n0.observable = Observable::N0;
  d.gap.observable = Observable::Gap;
  d.n0.gc = d.gap.gc = gc;
  for (double eta : etas) {
    const double scale = std::pow(eta, nu);
    const double oc = amp * std::pow(eta, -beta * nu);
    d.critical.push_back({eta, oc, oc, true});
    for (double x = x0; x / scale <= t_max * (1.0 + 1e-12); x *= ratio) {
      const double t = x / scale;
      if (t < t_min * (1.0 - 1e-12)) continue;
      const double v = oc * std::pow(1.0 + x, beta);
      d.n0.rows.push_back({eta, gc * (1.0 - t), v});
      d.n0.rows.push_back({eta, gc * (1.0 + t), v});
      d.gap.rows.push_back({eta, gc * (1.0 - t), v});
    }
  }
  return d;
}

json observable_report(const FssDataset& ds, const std::vector<CriticalPoint>& crit, double beta, double nu,
                       const std::vector<double>* bgrid, const std::vector<double>* ngrid, int jobs) {
  const CollapseResult c = collapse(ds, beta, nu);
  const PowerLawFit f = fit_critical_powerlaw(critical_series(crit, ds.observable));
  json r;
  r["beta"] = beta;
  r["nu"] = nu;
  r["residual"] = std::isfinite(c.residual) ? json(c.residual) : json(nullptr);
  r["compared_points"] = c.compared_points;
  r["excluded"] = {{"critical", c.excluded_critical},
                   {"nonpositive", c.excluded_nonpositive},
                   {"window", c.excluded_window}};
  r["fit"] = {{"gamma", f.exponent}, {"stderr", f.std_error}, {"r2", f.r2}, {"prefactor", f.prefactor},
              {"points", f.points}};
  json cj = json::array();
  for (const CriticalPoint& p : crit) {
    cj.push_back({{"eta", p.eta}, {"value", ds.observable == Observable::N0 ? p.n0 : p.gap}, {"converged", p.converged}});
  }
  r["critical"] = cj;
  json curves = json::array();
  for (const ScaledCurve& s : c.scaled_curves) {
    curves.push_back({{"eta", s.eta}, {"side", s.side}, {"x", s.x}, {"y", s.y}});
  }
  r["scaled_curves"] = curves;
  if (bgrid && ngrid) {
    const ExponentScan s = scan_exponents(ds, *bgrid, *ngrid, jobs);
    json surface = json::array();
    for (double v : s.surface) surface.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    r["scan"] = {{"beta", s.beta},         {"nu", s.nu},         {"residual", s.residual},
                 {"beta_grid", s.beta_grid}, {"nu_grid", s.nu_grid}, {"surface", surface}};
  }
  return r;
}

int cmd_fss(Args& a, std::ostream& out, std::ostream& err) {
  const Preset* p = resolve_preset(a, "fss");
  require(a, "tau", p, p && p->tau.has_value());
  require(a, "kappa", p, p && p->kappa.has_value());
  if (a.etas.size() < 3) throw UsageError("fss needs at least 3 --eta values");
  {
    std::vector<double> e = a.etas;
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end()) throw UsageError("--eta values must be distinct");
  }
  if (!(a.t_min > 0.0) || !(a.t_max >= a.t_min) || !(a.t_max < 1.0) || a.t_count < 2) {
    throw UsageError("need 0 < t-min <= t-max < 1 and t-count >= 2");
  }

  const CriticalCoupling gc = applicable_critical_coupling(a.tau, a.kappa);
  if (!gc.valid()) throw UsageError("no second-order critical coupling at this (tau, kappa): " + gc.invalid_reason);
  const bool triple = gc_triple(a.tau, a.kappa).valid();

  const double nu = std::isnan(a.nu) ? (triple ? 1.0 : 2.0 / 3.0) : a.nu;
  const double beta_n0 = std::isnan(a.beta_n0) ? 1.0 : a.beta_n0;
  const double beta_gap = std::isnan(a.beta_gap) ? (triple ? 1.0 : 0.5) : a.beta_gap;

  const std::vector<double> ts = log_spaced(a.t_min, a.t_max, a.t_count);
  const SolverOptions opts = solver_options(a.common);

  FssData data;
  if (a.synthetic) {
    data = synthetic_fss(a.etas, ts, gc.value, a.planted_beta, a.planted_nu);
  } else {
    FssConfig cfg;
    cfg.tau = a.tau;
    cfg.kappa = a.kappa;
    cfg.omega = a.common.omega;
    cfg.gc = gc.value;
    cfg.etas = a.etas;
    cfg.ts = ts;
    cfg.opts = opts;
    cfg.jobs = a.common.jobs;
    data = generate_fss(cfg);
  }
  for (FssDataset* ds : {&data.n0, &data.gap}) {
    ds->t_min = a.t_min;
    ds->t_max = a.t_max;
  }

  json config = {{"tau", a.tau},         {"kappa", a.kappa},       {"omega", a.common.omega},
                 {"eta", a.etas},        {"t_min", a.t_min},       {"t_max", a.t_max},
                 {"t_count", a.t_count}, {"synthetic", a.synthetic}, {"solver", solver_json(opts)}};
  if (a.synthetic) config["planted"] = {{"beta", a.planted_beta}, {"nu", a.planted_nu}};
  if (a.scan || a.synthetic) config["scan"] = {{"beta_grid", a.beta_grid}, {"nu_grid", a.nu_grid}};

  json meta = base_meta("fss", a);
  meta["config"] = config;
  meta["critical_coupling"] = {{"gtilde_c", gc.value}, {"triple_point", triple}, {"source", "analytic"}};

  std::string content;
  if (format_of(a.common) == Format::Json) {
    std::vector<double> bg, ng;
    const bool scan = a.scan || a.synthetic;
    if (scan) {
      bg = expand(parse_grid(a.beta_grid));
      ng = expand(parse_grid(a.nu_grid));
    }
    const int total = static_cast<int>(data.n0.rows.size() + data.critical.size());
    json report;
    report["tau"] = a.tau;
    report["kappa"] = a.kappa;
    report["gtilde_c"] = gc.value;
    report["triple_point"] = triple;
    report["eta"] = a.etas;
    report["t_window"] = {a.t_min, a.t_max};
    report["unconverged"] = data.unconverged;
    report["points"] = total;
    report["n0"] = observable_report(data.n0, data.critical, a.synthetic ? a.planted_beta : beta_n0,
                                     a.synthetic ? a.planted_nu : nu, scan ? &bg : nullptr, scan ? &ng : nullptr,
                                     a.common.jobs);
    report["gap"] = observable_report(data.gap, data.critical, a.synthetic ? a.planted_beta : beta_gap,
                                      a.synthetic ? a.planted_nu : nu, scan ? &bg : nullptr, scan ? &ng : nullptr,
                                      a.common.jobs);
    report["gamma_n0"] = report["n0"]["fit"]["gamma"];
    report["gamma_gap"] = report["gap"]["fit"]["gamma"];
    content = report.dump(2) + "\n";
    meta["schema"] = "report";
  } else {
    Table t{{"observable", "eta", "gtilde", "t", "side", "value"}, {}};
    for (const CriticalPoint& c : data.critical) t.add({std::string("n0"), c.eta, gc.value, 0.0, std::int64_t{0}, c.n0});
    for (const FssRow& r : data.n0.rows) {
      t.add({std::string("n0"), r.eta, r.gtilde, std::abs(1.0 - r.gtilde / gc.value),
             std::int64_t{r.gtilde < gc.value ? -1 : 1}, r.value});
    }
    for (const CriticalPoint& c : data.critical) t.add({std::string("gap"), c.eta, gc.value, 0.0, std::int64_t{0}, c.gap});
    for (const FssRow& r : data.gap.rows) {
      t.add({std::string("gap"), r.eta, r.gtilde, std::abs(1.0 - r.gtilde / gc.value), std::int64_t{-1}, r.value});
    }
    content = to_csv(t);
    meta["schema"] = "rows";
    meta["columns"] = t.columns;
  }
  emit(a.common.output, content, meta, out);
  const std::size_t total = data.n0.rows.size() + data.critical.size();
  return check_convergence(static_cast<std::size_t>(data.unconverged), total, err);
}

int cmd_gap_check(Args& a, std::ostream& out, std::ostream& err) {
  resolve_preset(a, "gap-check");
  require(a, "tau", nullptr, false);
  require(a, "kappa", nullptr, false);
  if (a.etas.empty()) throw UsageError("--eta is required");
  const auto gts = gtilde_values(a);
  const SolverOptions opts = solver_options(a.common);
  const double omega = a.common.omega;

  Table t{{"eta", "gtilde", "regime", "analytic_gap", "numeric_gap", "rel_dev", "compared", "converged", "note"}, {}};
  std::size_t bad = 0, total = 0;
  for (double eta : a.etas) {
    const Sweep s = sweep_coupling(a.tau, a.kappa, eta, omega, gts, opts, a.common.jobs);
    for (const SweepPoint& pt : s.points) {
      const SpectrumResult& r = pt.result;
      ++total;
      if (!r.converged) ++bad;
      const PhaseLabel lab = classify(a.tau, a.kappa, pt.gtilde);
      const std::string regime = phase_name(lab.phase);
      // In a superradiant phase E1 - E0 is the tunneling splitting of the
      // quasi-degenerate doublet; the effective-theory gap is the excitation
      // inside the ground-state parity sector.
      const double numeric = lab.phase == Phase::Normal ? r.gap : r.gap_same_parity;
      Cell analytic, dev;
      std::string note;
      bool compared = false;
      if (std::abs(lab.boundary_proximity) < 1e-9) {
        note = "on boundary";
      } else {
        try {
          const double e = analytic_gap(a.tau, a.kappa, pt.gtilde, omega).epsilon;
          analytic = e;
          if (e > 0.0) {
            dev = (numeric - e) / e;
            compared = true;
          } else {
            note = "analytic gap vanishes";
          }
        } catch (const std::domain_error& e) {
          note = "formula undefined";
        }
      }
      if (!r.converged) note += note.empty() ? "unconverged" : "; unconverged";
      t.add({eta, pt.gtilde, regime, analytic, numeric, dev, std::int64_t{compared ? 1 : 0},
             std::int64_t{r.converged ? 1 : 0}, note});
    }
  }

  json extra = json::object();
  if (gc_triple(a.tau, a.kappa).valid()) {
    const double gtri = gc_triple(a.tau, a.kappa).value;
    const double delta = 0.02;
    const double ratio = psrp_gap(a.tau, a.kappa, gtri + 2 * delta, omega) / psrp_gap(a.tau, a.kappa, gtri + delta, omega);
    t.add({std::monostate{}, gtri + delta, std::string("triple_ratio"), ratio, std::monostate{}, ratio / 2.0 - 1.0,
           std::int64_t{1}, std::monostate{}, std::string("psrp eps(2d)/eps(d), d = 0.02; linear vanishing gives 2")});
    extra = {{"gtilde_triple", gtri}, {"delta", delta}, {"ratio", ratio}};
  }

  json meta = base_meta("gap-check", a);
  meta["config"] = {{"tau", a.tau}, {"kappa", a.kappa}, {"omega", omega},
                    {"eta", a.etas}, {"gtilde", gts},   {"solver", solver_json(opts)}};
  meta["columns"] = t.columns;
  meta["numeric_gap"] = "E1 - E0 in the normal phase; first excitation in the ground-state parity sector otherwise";
  if (!extra.empty()) meta["triple_ratio"] = extra;
  emit(a.common.output, render(t, format_of(a.common)), meta, out);
  return check_convergence(bad, total, err);
}

int cmd_verify(Args& a, std::ostream& out, std::ostream& err) {
  resolve_preset(a, "verify");
  VerifyOptions vo;
  vo.inject_hermiticity_fault = a.inject_fault;
  const auto checks = run_invariant_suite(vo);
  Table t{{"module", "name", "passed", "observed", "bound"}, {}};
  int failed = 0;
  for (const CheckResult& c : checks) {
    t.add({c.module, c.name, std::int64_t{c.passed ? 1 : 0}, c.observed, c.bound});
    if (!c.passed) {
      ++failed;
      err << "FAIL " << c.module << " / " << c.name << ": observed " << format_double(c.observed) << ", bound "
          << format_double(c.bound) << "\n";
    }
  }
  json meta = base_meta("verify", a);
  meta["config"] = {{"inject_fault", a.inject_fault ? "hermiticity" : "none"}};
  meta["columns"] = t.columns;
  emit(a.common.output, render(t, format_of(a.common)), meta, out);
  err << checks.size() - static_cast<std::size_t>(failed) << " of " << checks.size() << " invariants passed\n";
  return failed ? kNumerical : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase boundaries, exact diagonalization and finite-size scaling for the anisotropic Rabi model "
               "with an A^2 term.",
               "rabi-critic"};
  app.set_version_flag("--version", std::string("rabi-critic ") + RABI_VERSION);
  app.require_subcommand(1);

  Args a;
  a.common.jobs = default_jobs();

  auto* bnd = app.add_subcommand("boundaries", "sample the analytic phase boundaries");
  a.track("kappa", bnd->add_option("--kappa", a.kappa, "A^2 strength ratio")->check(CLI::NonNegativeNumber));
  a.track("tau-range", bnd->add_option("--tau-range", a.tau_range, "lo:hi:step"));
  bnd->add_flag("--include-invalid", a.include_invalid, "also emit samples outside a formula's validity domain");
  add_common(bnd, a, false);

  auto* cls = app.add_subcommand("classify", "phase labels along a coupling line");
  add_point(cls, a);
  add_gtilde(cls, a);
  add_common(cls, a, false);

  auto* pd = app.add_subcommand("phase-diagram", "labelled (tau, gtilde) grid plus boundary overlay");
  a.track("kappa", pd->add_option("--kappa", a.kappa, "A^2 strength ratio")->check(CLI::NonNegativeNumber));
  a.track("tau-range", pd->add_option("--tau-range", a.tau_range, "lo:hi:step"));
  a.track("gtilde-range", pd->add_option("--gtilde-range", a.gtilde_range, "lo:hi:step"));
  add_common(pd, a, false);

  auto* sw = app.add_subcommand("sweep", "ground-state observables along gtilde");
  add_point(sw, a);
  add_gtilde(sw, a);
  add_etas(sw, a);
  add_common(sw, a, true);

  auto* fss = app.add_subcommand("fss", "finite-size scaling: data collapse and critical power laws");
  add_point(fss, a);
  add_etas(fss, a);
  fss->add_option("--t-min", a.t_min, "smallest reduced distance |1 - gtilde/gc|");
  fss->add_option("--t-max", a.t_max, "largest reduced distance");
  fss->add_option("--t-count", a.t_count, "log-spaced t values per side");
  fss->add_option("--beta-n0", a.beta_n0, "collapse exponent for n0 (default 1)");
  fss->add_option("--beta-gap", a.beta_gap, "collapse exponent for the gap (default 1/2, or 1 at a triple point)");
  fss->add_option("--nu", a.nu, "correlation-length exponent (default 2/3, or 1 at a triple point)");
  fss->add_flag("--scan", a.scan, "grid-search (beta, nu) for both observables");
  fss->add_option("--beta-grid", a.beta_grid, "lo:hi:step for --scan");
  fss->add_option("--nu-grid", a.nu_grid, "lo:hi:step for --scan");
  fss->add_flag("--synthetic", a.synthetic, "replace diagonalization with planted scaling data");
  fss->add_option("--planted-beta", a.planted_beta, "beta of the synthetic data");
  fss->add_option("--planted-nu", a.planted_nu, "nu of the synthetic data");
  add_common(fss, a, true);

  auto* gap = app.add_subcommand("gap-check", "analytic gap formulas against diagonalization");
  add_point(gap, a);
  add_gtilde(gap, a);
  add_etas(gap, a);
  add_common(gap, a, true);

  auto* ver = app.add_subcommand("verify", "run the small-scale invariant suite");
  ver->add_flag("--inject-fault", a.inject_fault, "perturb one Hamiltonian element (the suite must then fail)");
  add_common(ver, a, false);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (a.common.jobs < 1) throw UsageError("jobs must be >= 1");
    if (bnd->parsed()) return cmd_boundaries(a, out, err);
    if (cls->parsed()) return cmd_classify(a, out, err);
    if (pd->parsed()) return cmd_phase_diagram(a, out, err);
    if (sw->parsed()) return cmd_sweep(a, out, err);
    if (fss->parsed()) return cmd_fss(a, out, err);
    if (gap->parsed()) return cmd_gap_check(a, out, err);
    if (ver->parsed()) return cmd_verify(a, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace rabi::cli
