// rdl_cli: config-driven experiment runner. Every command reads a JSON config
// with a "command" field and writes CSV (or JSON) tables; `sample` writes a
// binary outcome file. Output bytes depend only on the config and the seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdl/rdl.hpp"

namespace {

using nlohmann::json;
using namespace rdl;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

/// Raised when --strict finds a result outside its validity region.
struct strict_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config access that reports dotted field paths.

class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *j_; }
  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) throw config_error(path_ + "." + key + ": missing");
    return {j_->at(key), path_ + "." + key};
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!j_->is_object()) fail("expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_->items())
      if (!ok.count(k)) throw config_error(path_ + "." + k + ": unknown field");
  }

  double number() const {
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_string()) {
      const auto s = j_->get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
    }
    fail("expected a number");
  }

  double number(const std::string& key, double fallback) const { return has(key) ? at(key).number() : fallback; }

  std::uint64_t count() const {
    if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
    if (j_->is_number_integer() && j_->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j_->get<std::int64_t>());
    fail("expected a nonnegative integer");
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? at(key).count() : fallback;
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  /// A scalar, an array, {"from", "to", "step"} or {"from", "to", "count", "log"}.
  std::vector<double> values() const {
    std::vector<double> out;
    if (j_->is_array()) {
      for (std::size_t i = 0; i < j_->size(); ++i) out.push_back(Node(j_->at(i), path_ + "[" + std::to_string(i) + "]").number());
    } else if (j_->is_object()) {
      const double from = at("from").number(), to = at("to").number();
      if (has("step")) {
        allow({"from", "to", "step"});
        const double step = at("step").number();
        if (!(step > 0.0) || !(to >= from)) fail("need step > 0 and to >= from");
        const auto k = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
        for (std::size_t i = 0; i <= k; ++i) out.push_back(from + step * static_cast<double>(i));
      } else {
        allow({"from", "to", "count", "log"});
        const auto k = at("count").count();
        const bool log = has("log") && at("log").raw().is_boolean() && at("log").raw().get<bool>();
        if (k < 2 || !(to > from) || (log && !(from > 0.0))) fail("need count >= 2, to > from (and from > 0 for log)");
        for (std::uint64_t i = 0; i < k; ++i) {
          const double t = static_cast<double>(i) / static_cast<double>(k - 1);
          out.push_back(log ? std::exp(std::log(from) + t * (std::log(to) - std::log(from))) : from + t * (to - from));
        }
        out.back() = to;
      }
    } else {
      out.push_back(number());
    }
    if (out.empty()) fail("empty list");
    return out;
  }

  /// values() rounded to positive integers, duplicates removed (log ranges collide at small n).
  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out;
    for (double v : values()) {
      const double r = std::round(v);
      if (!(r >= 1.0) || r > 1e9) fail("expected integers >= 1");
      const auto s = static_cast<std::size_t>(r);
      if (out.empty() || out.back() != s) out.push_back(s);
    }
    return out;
  }

  cplx complex() const {
    if (!j_->is_array() || j_->size() != 2) fail("expected [re, im]");
    return {Node(j_->at(0), path_ + "[0]").number(), Node(j_->at(1), path_ + "[1]").number()};
  }

  ComplexVec vec() const {
    if (!j_->is_array() || j_->empty()) fail("expected a list of [re, im] pairs");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j_->size(); ++i) out.push_back(Node(j_->at(i), path_ + "[" + std::to_string(i) + "]").complex());
    return ComplexVec(std::move(out));
  }

  [[noreturn]] void fail(const std::string& what) const { throw config_error(path_ + ": " + what); }

 private:
  const json* j_;
  std::string path_;
};

SchemeConfig scheme_from(const Node& node) {
  node.allow({"r", "T_b", "T_a", "s"});
  SchemeConfig s;
  s.r = node.number("r", 0.0);
  s.t_before = node.number("T_b", 1.0);
  s.t_after = node.number("T_a", 1.0);
  s.s = node.has("s") && !node.at("s").raw().is_null() ? node.at("s").number() : std::numeric_limits<double>::infinity();
  try {
    s.validate();
  } catch (const config_error& e) {
    throw config_error(node.path() + "." + std::string(e.what()).substr(std::string("scheme.").size()));
  }
  return s;
}

ChannelSpec channel_from(const Node& node) {
  if (!node.has("preset")) return channel_from_json(node.raw());
  const auto preset = node.at("preset").str();
  if (preset == "five_peak") {
    node.allow({"preset", "sigma", "gamma"});
    return five_peak_example(node.at("sigma").number(), node.at("gamma").complex());
  }
  if (preset == "three_peak") {
    node.allow({"preset", "sigma", "gamma", "eps0"});
    return three_peak(node.at("gamma").vec(), node.at("eps0").number(), node.at("sigma").number());
  }
  if (preset == "depolarizing") {
    node.allow({"preset", "sigma", "n"});
    return depolarizing(node.at("n").count(), node.at("sigma").number());
  }
  node.at("preset").fail("unknown preset '" + preset + "' (five_peak, three_peak, depolarizing)");
}

// ---------------------------------------------------------------------------
// Run context and output

struct Run {
  Node cfg;
  json echo;  // config as embedded in every artifact (no threads, no paths)
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string input;
  std::string format = "csv";
  bool strict = false;

  RandomStream root() const { return RandomStream(seed, 0); }
  std::string ext() const { return format == "json" ? ".json" : ".csv"; }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path);
}

void emit(const Run& run, const Table& table, const std::string& path) {
  if (run.format == "json") {
    write_text(path, table.to_json(run.echo).dump(2) + "\n");
  } else {
    std::ostringstream ss;
    table.write_csv(ss, run.echo);
    write_text(path, ss.str());
  }
}

std::vector<double> axis(double half, std::size_t points) {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i)
    xs[i] = points == 1 ? 0.0 : -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
  return xs;
}

std::pair<double, std::size_t> grid_params(const Node& parent, const std::string& key, double half, std::size_t points) {
  if (!parent.has(key)) return {half, points};
  const auto g = parent.at(key);
  g.allow({"half", "points"});
  const double h = g.number("half", half);
  const auto p = static_cast<std::size_t>(g.count("points", points));
  if (!(h > 0.0)) g.at("half").fail("must be > 0");
  if (p < 2 || p > 100000) g.fail("points must lie in [2, 100000]");
  return {h, p};
}

// ---------------------------------------------------------------------------
// Commands

void cmd_fig2(const Run& run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "sigma", "gamma", "r", "density", "charfn", "mc"});
  const double sigma = c.number("sigma", 0.3);
  const cplx gamma = c.has("gamma") ? c.at("gamma").complex() : cplx{1.6, 0.0};
  const ChannelSpec spec = five_peak_example(sigma, gamma);
  const SchemeConfig ea = SchemeConfig::ideal(c.number("r", 2.0));
  const SchemeConfig vh = SchemeConfig::vacuum_heterodyne();
  ea.validate();

  // Outcome densities on the α plane.
  const auto [dh, dp] = grid_params(c, "density", 10.0, 201);
  const auto xs = axis(dh, dp);
  const ChannelSpec meas_ea = measured_channel(spec, ea), meas_vh = measured_channel(spec, vh);
  std::vector<std::array<double, 3>> dens(dp * dp);
  parallel_for(dp, run.threads, [&](std::size_t i) {
    for (std::size_t k = 0; k < dp; ++k) {
      const cplx a{xs[i], xs[k]};
      const std::span<const cplx> v(&a, 1);
      dens[i * dp + k] = {eval_p(spec, v), eval_p_meas(meas_ea, ea, v), eval_p_meas(meas_vh, vh, v)};
    }
  });
  Table density({"alpha_re", "alpha_im", "p_true", "p_ea", "p_vh"});
  std::array<double, 3> mass{0.0, 0.0, 0.0};
  const double cell = std::pow(xs[1] - xs[0], 2);
  for (std::size_t i = 0; i < dp; ++i)
    for (std::size_t k = 0; k < dp; ++k) {
      const auto& d = dens[i * dp + k];
      density.add_row({xs[i], xs[k], d[0], d[1], d[2]});
      for (int m = 0; m < 3; ++m) mass[m] += d[m] * cell;
    }
  if (run.strict)
    for (double m : mass)
      if (std::abs(m - 1.0) > 1e-3)
        throw strict_violation("fig2: density grid mass " + format_double(m) + " is not within 1e-3 of 1; widen density.half");

  // Closed-form characteristic functions on the β plane.
  const auto [ch, cp] = grid_params(c, "charfn", 3.0, 61);
  const auto bs = axis(ch, cp);
  Table charfn({"beta_re", "beta_im", "lambda_re", "lambda_im", "lambda_ea_re", "lambda_ea_im", "lambda_vh_re",
                "lambda_vh_im"});
  for (double br : bs)
    for (double bi : bs) {
      const cplx b{br, bi};
      const cplx lam = eval_lambda(spec, std::span<const cplx>(&b, 1));
      const double b2 = std::norm(b);
      const cplx le = lam / ea.envelope(b2), lv = lam / vh.envelope(b2);
      charfn.add_row({br, bi, lam.real(), lam.imag(), le.real(), le.imag(), lv.real(), lv.imag()});
    }

  // Monte Carlo estimates along the real β axis, both schemes.
  std::size_t mc_n = 100000;
  double mh = 3.0;
  std::size_t mp = 41;
  if (c.has("mc")) {
    const auto m = c.at("mc");
    m.allow({"N", "half", "points"});
    mc_n = m.count("N", mc_n);
    mh = m.number("half", mh);
    mp = m.count("points", mp);
    if (mc_n == 0) m.at("N").fail("must be >= 1");
    if (mp < 2) m.at("points").fail("must be >= 2");
  }
  std::vector<ComplexVec> betas;
  for (double br : axis(mh, mp)) betas.push_back(ComplexVec{cplx{br, 0.0}});
  const auto root = run.root();
  const auto s_ea = sample_outcomes(spec, ea, mc_n, root.split(0), run.threads);
  const auto s_vh = sample_outcomes(spec, vh, mc_n, root.split(1), run.threads);
  const auto e_ea = estimate_lambda_batch(s_ea, betas, run.threads);
  const auto e_vh = estimate_lambda_batch(s_vh, betas, run.threads);
  Table mc({"beta_re", "beta_im", "lambda_re", "ea_hat_re", "ea_hat_im", "ea_se", "vh_hat_re", "vh_hat_im", "vh_se", "N"});
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const cplx lam = eval_lambda(spec, betas[i]);
    mc.add_row({betas[i][0].real(), 0.0, lam.real(), e_ea[i].lambda_hat.real(), e_ea[i].lambda_hat.imag(),
                e_ea[i].std_error, e_vh[i].lambda_hat.real(), e_vh[i].lambda_hat.imag(), e_vh[i].std_error, mc_n});
  }

  emit(run, density, run.out + "_density" + run.ext());
  emit(run, charfn, run.out + "_charfn" + run.ext());
  emit(run, mc, run.out + "_mc" + run.ext());
}

BoundKind lower_kind(const Node& c, double sigma) {
  if (!c.has("lower_bound")) return sigma == 0.0 ? BoundKind::ef_main : BoundKind::ef_finite_sigma;
  const auto k = c.at("lower_bound").str();
  if (k == "main") return BoundKind::ef_main;
  if (k == "finite_sigma") return BoundKind::ef_finite_sigma;
  if (k == "gaussian") {
    if (sigma == 0.0) c.at("lower_bound").fail("the gaussian bound needs sigma > 0");
    return BoundKind::ef_gaussian;
  }
  c.at("lower_bound").fail("expected main, finite_sigma or gaussian");
}

void cmd_advantage(const Run& run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "n", "kappa", "sigma", "eps", "delta", "scheme", "r", "lower_bound"});
  const auto ns = c.at("n").sizes();
  const auto kappas = c.has("kappa") ? c.at("kappa").values() : std::vector<double>{1.0};
  const double sigma = c.number("sigma", 0.0);
  const double eps = c.number("eps", 0.2), delta = c.number("delta", 1.0 / 3.0);
  SchemeConfig base = c.has("scheme") ? scheme_from(c.at("scheme")) : SchemeConfig::ideal(1.0);
  const auto rs = c.has("r") ? c.at("r").values() : std::vector<double>{base.r};
  const BoundKind kind = lower_kind(c, sigma);

  Table t(bounds_columns());
  std::string first_invalid;
  for (std::size_t n : ns)
    for (double kappa : kappas)
      for (double r : rs) {
        SchemeConfig s = base;
        s.r = r;
        if (!(r >= 0.0)) c.fail("r values must be >= 0");
        const BoundQuery q{n, kappa, eps, delta, sigma};
        const auto ratio = advantage_ratio(q, s.effective_r(), kind);
        const auto lower = lower_bound(q, kind);
        const auto upper = upper_bound_ea(q, s.effective_r());
        int flags = 0;
        if (n < 8) flags |= 1;
        if (eps > 0.24) flags |= 2;
        if (kind == BoundKind::ef_finite_sigma && !finite_sigma_condition(q)) flags |= 4;
        if (!std::isfinite(ratio.log10_N)) flags |= 8;
        if ((flags & 7) != 0 && lower.valid) throw numeric_error("advantage: validity flags disagree with the bound");
        if (flags && first_invalid.empty())
          first_invalid = "n=" + std::to_string(n) + " kappa=" + format_double(kappa) + " r=" + format_double(r) +
                          " (" + (lower.reason.empty() ? "non-finite ratio" : lower.reason) + ")";
        t.add_row({n, kappa, eps, delta, sigma, r, s.t_before, s.t_after, lower.log10_N, upper.log10_N,
                   ratio.log10_N, flags});
      }
  if (run.strict && !first_invalid.empty()) throw strict_violation("advantage: invalid cell " + first_invalid);
  emit(run, t, run.out);
}

ComplexVec flat_beta(std::size_t n, double norm_sq) {
  return ComplexVec::filled(n, cplx{std::sqrt(norm_sq / static_cast<double>(n)), 0.0});
}

void cmd_complexity(const Run& run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "channel", "scheme", "eps", "delta", "beta_norm_sq", "trials"});
  const ChannelSpec spec = channel_from(c.at("channel"));
  const SchemeConfig s = c.has("scheme") ? scheme_from(c.at("scheme")) : SchemeConfig::ideal(1.0);
  const double eps = c.number("eps", 0.2), delta = c.number("delta", 1.0 / 3.0);
  const auto b2s = c.at("beta_norm_sq").values();
  const auto trials = static_cast<std::size_t>(c.count("trials", 200));
  const double r_eff = s.effective_r();
  const auto root = run.root();

  Table t({"beta_norm_sq", "r_eff", "N", "trials", "failure_rate", "delta", "within_delta"});
  std::string first_bad;
  for (std::size_t i = 0; i < b2s.size(); ++i) {
    const std::uint64_t N = hoeffding_N(eps, delta, r_eff, b2s[i]);
    if (N > 100'000'000) throw numeric_error("complexity: Hoeffding N = " + std::to_string(N) + " is too large to simulate");
    const double rate = empirical_failure_rate(spec, s, flat_beta(spec.modes(), b2s[i]), eps, static_cast<std::size_t>(N),
                                               trials, root.split(i), run.threads);
    if (rate > delta && first_bad.empty()) first_bad = format_double(b2s[i]);
    t.add_row({b2s[i], r_eff, N, trials, rate, delta, rate <= delta});
  }
  if (run.strict && !first_bad.empty())
    throw strict_violation("complexity: failure rate exceeds delta at |beta|^2 = " + first_bad);
  emit(run, t, run.out);
}

void cmd_tail(const Run& run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "n", "kappa"});
  const auto ns = c.has("n") ? c.at("n").sizes() : Node(json{{"from", 8}, {"to", 14000}, {"count", 40}, {"log", true}}, "default.n").sizes();
  const double kappa = c.number("kappa", 1.0);
  Table t({"n", "tail", "bound", "le_half"});
  std::string first_bad;
  for (std::size_t n : ns) {
    const double q = gaussian_tail(n, kappa);
    if (q > 0.5 && first_bad.empty()) first_bad = std::to_string(n);
    t.add_row({n, q, gaussian_tail_bound(n), q <= 0.5});
  }
  if (run.strict && !first_bad.empty()) throw strict_violation("tail: value exceeds 0.5 at n = " + first_bad);
  emit(run, t, run.out);
}

void cmd_noise(const Run& run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "r", "n", "beta_norm_sq", "shapes", "delta_deg", "theta_deg"});
  const double r = c.number("r", 1.5);
  const auto n = static_cast<std::size_t>(c.count("n", 50));
  if (n == 0) c.at("n").fail("must be >= 1");
  const auto b2s = c.has("beta_norm_sq") ? c.at("beta_norm_sq").values() : Node(json{{"from", 0}, {"to", 130}, {"step", 5}}, "default").values();
  std::vector<std::string> shapes{"flat", "single"};
  if (c.has("shapes")) {
    shapes.clear();
    const auto sh = c.at("shapes");
    if (!sh.raw().is_array()) sh.fail("expected a list");
    for (std::size_t i = 0; i < sh.raw().size(); ++i) {
      const auto s = Node(sh.raw()[i], sh.path() + "[" + std::to_string(i) + "]").str();
      if (s != "flat" && s != "single") sh.fail("shapes are flat or single");
      shapes.push_back(s);
    }
  }
  const auto deltas = c.has("delta_deg") ? c.at("delta_deg").values() : std::vector<double>{0.0, 1.0, 2.0};
  const auto thetas = c.has("theta_deg") ? c.at("theta_deg").values() : std::vector<double>{0.0, 1.0, 2.0};

  struct Job {
    std::string shape;
    double b2, delta_deg, theta_deg;
  };
  std::vector<Job> jobs;
  for (const auto& sh : shapes)
    for (double b2 : b2s) {
      for (double d : deltas) jobs.push_back({sh, b2, d, 0.0});
      for (double th : thetas)
        if (th != 0.0 || std::find(deltas.begin(), deltas.end(), 0.0) == deltas.end()) jobs.push_back({sh, b2, 0.0, th});
    }
  std::vector<NoiseEnvelope> env(jobs.size());
  constexpr double kDeg = std::numbers::pi / 180.0;
  parallel_for(jobs.size(), run.threads, [&](std::size_t i) {
    const auto& j = jobs[i];
    ComplexVec beta(n);
    if (j.shape == "flat")
      beta = flat_beta(n, j.b2);
    else
      beta[0] = {std::sqrt(j.b2), 0.0};
    if (j.theta_deg == 0.0)
      env[i] = phase_diffusion_g_sq(beta, r, j.delta_deg * kDeg);  // Δ = 0 is the exact noiseless envelope
    else
      env[i] = crosstalk_envelope(beta, r, j.theta_deg * kDeg);
  });
  Table t(noise_columns());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (run.strict && !(env[i].g_sq > 0.0 && std::isfinite(env[i].g_sq)))
      throw strict_violation("noise: envelope underflows at |beta|^2 = " + format_double(jobs[i].b2));
    t.add_row({jobs[i].b2, jobs[i].shape, r, jobs[i].delta_deg, jobs[i].theta_deg, env[i].g_sq, env[i].overhead});
  }
  emit(run, t, run.out);
}

void cmd_game(const Run& run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "n", "kappa", "sigma", "eps0", "N", "delta", "rounds", "scheme"});
  GameConfig g;
  g.n = static_cast<std::size_t>(c.count("n", g.n));
  g.kappa = c.number("kappa", g.kappa);
  g.sigma = c.number("sigma", g.sigma);
  g.eps0 = c.number("eps0", g.eps0);
  if (c.has("scheme")) g.scheme = scheme_from(c.at("scheme"));
  g.validate();
  if (!c.has("N") || (c.at("N").raw().is_string() && c.at("N").str() == "hoeffding")) {
    if (g.eps0 == 0.0) c.fail("N = hoeffding needs eps0 > 0; give an explicit N");
    g.N = static_cast<std::size_t>(
        hoeffding_N(g.eps(), c.number("delta", 1.0 / 3.0), g.scheme.effective_r(), g.kappa * static_cast<double>(g.n)));
  } else {
    g.N = static_cast<std::size_t>(c.at("N").count());
  }
  const auto rounds = static_cast<std::size_t>(c.count("rounds", 10000));
  const auto s = run_game(g, rounds, run.root(), run.threads);
  if (run.format == "json") {
    json j = {{"schema", kSchemaVersion},          {"config", run.echo},
              {"rounds", s.rounds},                {"N", s.N},
              {"success_rate", s.success_rate},    {"ci_low", s.ci_low},
              {"ci_high", s.ci_high},              {"in_range_fraction", s.in_range_fraction},
              {"in_range_success_rate", s.in_range_success_rate}};
    write_text(run.out, j.dump(2) + "\n");
    return;
  }
  Table t({"rounds", "N", "success_rate", "ci_low", "ci_high", "in_range_fraction", "in_range_success_rate"});
  t.add_row({s.rounds, s.N, s.success_rate, s.ci_low, s.ci_high, s.in_range_fraction, s.in_range_success_rate});
  emit(run, t, run.out);
}

void cmd_sample(const Run& run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "channel", "scheme", "N", "substream", "chunk_size"});
  const ChannelSpec spec = channel_from(c.at("channel"));
  const SchemeConfig s = c.has("scheme") ? scheme_from(c.at("scheme")) : SchemeConfig::ideal(1.0);
  const auto N = static_cast<std::size_t>(c.at("N").count());
  if (N == 0) c.at("N").fail("must be >= 1");
  const auto chunk = static_cast<std::size_t>(c.count("chunk_size", kDefaultChunkSize));
  if (chunk == 0) c.at("chunk_size").fail("must be >= 1");
  const auto samples = sample_outcomes(spec, s, N, RandomStream(run.seed, c.count("substream", 0)), run.threads, chunk);
  write_outcomes(run.out, samples);
}

void cmd_estimate(Run run) {
  const auto& c = run.cfg;
  c.allow({"command", "seed", "outcomes", "betas", "grid"});
  const std::string path = !run.input.empty() ? run.input : c.at("outcomes").str();
  const auto samples = read_outcomes(path);
  std::vector<ComplexVec> betas;
  if (c.has("betas")) {
    const auto b = c.at("betas");
    if (!b.raw().is_array() || b.raw().empty()) b.fail("expected a list of beta vectors");
    for (std::size_t i = 0; i < b.raw().size(); ++i) {
      auto v = Node(b.raw()[i], b.path() + "[" + std::to_string(i) + "]").vec();
      if (v.size() != samples.n) b.fail("beta " + std::to_string(i) + " has " + std::to_string(v.size()) + " modes, outcomes have " + std::to_string(samples.n));
      betas.push_back(std::move(v));
    }
  } else {
    if (samples.n != 1) c.fail("grid estimation needs single-mode outcomes; give betas instead");
    const auto [h, p] = grid_params(c, "grid", 3.0, 31);
    for (double br : axis(h, p))
      for (double bi : axis(h, p)) betas.push_back(ComplexVec{cplx{br, bi}});
  }
  run.echo.erase("outcomes");
  run.echo["outcome_header"] = outcome_header(samples);
  const auto results = estimate_lambda_batch(samples, betas, run.threads);
  emit(run, estimates_table(results, samples.n), run.out);
}

const char* kHelpFooter = R"(Commands (config "command" field):
  fig2        five-peak example: <out>_density (alpha_re, alpha_im, p_true, p_ea, p_vh),
              <out>_charfn (beta_re, beta_im, lambda_*, lambda_ea_*, lambda_vh_*),
              <out>_mc (MC estimates along the real beta axis with standard errors)
              keys: sigma, gamma [re,im], r, density{half,points}, charfn{half,points}, mc{N,half,points}
  advantage   bounds grid: n, kappa, eps, delta, sigma, r, T_b, T_a, log10_N_lower,
              log10_N_upper, log10_ratio, valid_flags (bits: 1 n<8, 2 eps>0.24,
              4 finite-sigma condition fails, 8 non-finite)
              keys: n, kappa, sigma, eps, delta, scheme{r,T_b,T_a,s}, r, lower_bound
  complexity  Hoeffding N vs empirical failure rate: beta_norm_sq, r_eff, N, trials,
              failure_rate, delta, within_delta
              keys: channel, scheme, eps, delta, beta_norm_sq, trials
  tail        n, tail, bound, le_half        keys: n, kappa
  noise       beta_norm_sq, shape_tag, r, delta_deg, theta_deg, g_sq, overhead
              keys: r, n, beta_norm_sq, shapes, delta_deg, theta_deg
  game        rounds, N, success_rate, ci_low, ci_high, in_range_fraction, in_range_success_rate
              keys: n, kappa, sigma, eps0, N (int or "hoeffding"), delta, rounds, scheme
  sample      binary outcome file       keys: channel, scheme, N, substream, chunk_size
  estimate    beta_re_*, beta_im_*, lambda_re, lambda_im, se, N, envelope
              keys: outcomes (or --input), betas [[[re,im],...],...] or grid{half,points}

Lists accept a number, an array, {"from","to","step"} or {"from","to","count","log"}.
CSV files start with "# schema: v1" and "# config: <json>".
Exit codes: 0 ok, 1 I/O error, 2 config error, 3 numeric or --strict validity error.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random displacement channel learning: simulations, estimators and bounds"};
  std::string config_path, out, input, format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool strict = false;
  app.add_option("--config", config_path, "JSON config with a \"command\" field")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed (overrides config \"seed\"; default 1)");
  app.add_option("--threads", threads, "worker threads (output does not depend on it)")->check(CLI::Range(1u, 1024u));
  app.add_option("--out", out, "output path (fig2: prefix)")->required();
  app.add_option("--input", input, "outcome file for estimate (overrides config \"outcomes\")");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--strict", strict, "exit 3 instead of writing results outside their validity region");
  app.footer(kHelpFooter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  seed_given = seed_opt->count() > 0;

  try {
    json raw;
    {
      std::ifstream is(config_path);
      if (!is) throw config_error("cannot open " + config_path);
      try {
        raw = json::parse(is);
      } catch (const json::exception& e) {
        throw config_error(config_path + ": " + e.what());
      }
    }
    const Node root(raw, "config");
    if (!raw.is_object()) root.fail("expected an object");
    const std::string command = root.at("command").str();
    if (!seed_given) seed = root.count("seed", 1);

    Run run{root, raw, seed, threads, out, input, format, strict};
    run.echo["seed"] = seed;

    static const std::map<std::string, void (*)(const Run&)> commands = {
        {"fig2", cmd_fig2}, {"advantage", cmd_advantage}, {"complexity", cmd_complexity}, {"tail", cmd_tail},
        {"noise", cmd_noise}, {"game", cmd_game}, {"sample", cmd_sample}};
    if (command == "estimate") {
      cmd_estimate(run);
    } else {
      const auto it = commands.find(command);
      if (it == commands.end()) root.at("command").fail("unknown command '" + command + "'");
      it->second(run);
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dimension_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const strict_violation& e) {
    std::cerr << "strict: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
