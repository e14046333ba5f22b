#include "delpolar/polarization_lab.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "delpolar/parallel.hpp"

namespace delpolar {

void ProcessParams::validate() const {
  if (!(kappa >= 1.0))
    throw std::invalid_argument("process: kappa must be at least 1");
  if (!(d >= 0.0))
    throw std::invalid_argument("process: d must be nonnegative");
  if (!(gamma > 0.5))
    throw std::invalid_argument("process: gamma must exceed 1/2");
  if (!(beta > 0.0))
    throw std::invalid_argument("process: beta must be positive");
  if (!(nu > 0.0))
    throw std::invalid_argument("process: nu must be positive");
  if (n_w < 0 || n_w >= n_max)
    throw std::invalid_argument("process: need 0 <= n_w < n_max");
  if (n_max > 60)
    throw std::invalid_argument("process: horizon limited to n_max <= 60");
  if (!(start_factor > 0.0 && start_factor <= 1.0))
    throw std::invalid_argument("process: start_factor must lie in (0,1]");
  if (!(slack > 0.0 && slack <= 1.0))
    throw std::invalid_argument("process: slack must lie in (0,1]");
}

bool ProcessParams::ordering_holds() const {
  return 0.5 < gamma_a && gamma_a < gamma && 0.0 < nu_b && nu_b < nu && nu < 1.0 / 3.0 &&
         beta > 0.0 && beta < 0.5;
}

int ProcessParams::domination_threshold() const {
  if (!(gamma > gamma_a))
    return std::numeric_limits<int>::max();
  return static_cast<int>(std::ceil(1.0 / (gamma - gamma_a)));
}

namespace {

// log2 of kappa N^d at level n.
double log2_gain(int n, const ProcessParams& p) { return std::log2(p.kappa) + p.d * n; }

// 2^{-N^x} at level n.
ExtFloat tail(int n, double x) { return ExtFloat::from_log2(-std::exp2(x * n)); }

ExtFloat apply(const ExtFloat& z, std::uint8_t b) { return b ? z * z : z; }

} // namespace

ExtFloat step_process(const ExtFloat& z, int n, std::uint8_t b, const ProcessParams& params) {
  return ExtFloat::from_log2(log2_gain(n, params)) * apply(z, b) + tail(n, params.gamma);
}

ProcessPath simulate_path(const ProcessParams& params, std::span<const std::uint8_t> b) {
  params.validate();
  const std::size_t steps = static_cast<std::size_t>(params.n_max - params.n_w);
  if (b.size() != steps)
    throw std::invalid_argument("simulate_path: need one draw per step of the horizon");
  ProcessPath path;
  path.b.assign(b.begin(), b.end());
  const ExtFloat walking = tail(params.n_w, params.nu);
  const ExtFloat slack = ExtFloat::from_double(params.slack);
  path.z.push_back(ExtFloat::from_double(params.start_factor) * walking);
  path.z_prime.push_back(path.z.back());
  path.z_second.push_back(walking);
  path.z_bar.push_back(walking);
  for (std::size_t k = 0; k < steps; ++k) {
    const int n = params.n_w + static_cast<int>(k);
    const std::uint8_t bit = b[k] & 1u;
    path.z.push_back(slack * step_process(path.z.back(), n, bit, params));
    path.z_prime.push_back(step_process(path.z_prime.back(), n, bit, params));
    path.z_second.push_back(step_process(path.z_second.back(), n, bit, params));
    path.z_bar.push_back(ExtFloat::from_log2(1.0 + log2_gain(n, params)) *
                         apply(path.z_bar.back(), bit));
  }

  path.sigma_a = path.sigma_b = path.sigma_c = path.sigma_d = true;
  path.last_slow_level = params.n_w - 1;
  for (std::size_t k = 0; k <= steps; ++k) {
    const int n = params.n_w + static_cast<int>(k);
    const ExtFloat& zb = path.z_bar[k];
    path.sigma_a = path.sigma_a && zb >= tail(n, params.gamma_a);
    path.sigma_b = path.sigma_b && zb <= tail(n, params.nu_b);
    if (n >= params.n_r)
      path.sigma_c = path.sigma_c &&
                     zb < ExtFloat::from_log2(-std::exp2(params.beta * n) - n - 1.0);
    path.sigma_d = path.sigma_d && path.z[k] <= zb;
    if (!(path.z[k] < tail(n, params.beta)))
      path.last_slow_level = n;
  }
  return path;
}

ProcessPath sample_path(const ProcessParams& params, Rng& rng) {
  Bits b(static_cast<std::size_t>(params.n_max - params.n_w));
  for (auto& bit : b)
    bit = rng.bit();
  return simulate_path(params, b);
}

bool coupling_holds(const ProcessPath& path) {
  for (std::size_t k = 0; k < path.z.size(); ++k)
    if (!(path.z[k] <= path.z_prime[k] && path.z_prime[k] <= path.z_second[k]))
      return false;
  return true;
}

DominationOutcome check_domination(const ProcessPath& path, const ProcessParams& params) {
  if (params.n_w < params.domination_threshold() || !(path.z.front() <= path.z_bar.front()))
    return DominationOutcome::Skipped;
  if (!path.sigma_a)
    return DominationOutcome::Vacuous;
  for (std::size_t k = 0; k < path.z.size(); ++k)
    if (!(path.z[k] <= path.z_second[k] && path.z_second[k] <= path.z_bar[k]))
      return DominationOutcome::Violated;
  return DominationOutcome::Holds;
}

Ensemble simulate_paths(const ProcessParams& params, std::size_t paths, std::uint64_t seed,
                        unsigned workers) {
  if (paths < 1)
    throw std::invalid_argument("simulate_paths: need at least one path");
  params.validate();
  Ensemble e;
  e.params = params;
  e.paths.resize(paths);
  parallel_for(paths, workers, [&](std::size_t k) {
    Rng rng(derive_trial_seed(seed, "lab", k));
    e.paths[k] = sample_path(params, rng);
  });
  return e;
}

RunningCurve running_fraction(const Ensemble& ensemble) {
  if (ensemble.paths.empty())
    throw std::invalid_argument("running_fraction: empty ensemble");
  RunningCurve c;
  const double total = static_cast<double>(ensemble.paths.size());
  for (int n_r = ensemble.params.n_w; n_r <= ensemble.params.n_max; ++n_r) {
    std::size_t count = 0;
    for (const ProcessPath& p : ensemble.paths)
      count += p.last_slow_level < n_r;
    c.n_r.push_back(n_r);
    c.fraction.push_back(static_cast<double>(count) / total);
  }
  return c;
}

SigmaStats sigma_event_stats(const Ensemble& ensemble) {
  if (ensemble.paths.empty())
    throw std::invalid_argument("sigma_event_stats: empty ensemble");
  SigmaStats s;
  s.paths = ensemble.paths.size();
  std::size_t a = 0, b = 0, c = 0, d = 0, cd = 0;
  for (const ProcessPath& p : ensemble.paths) {
    a += p.sigma_a;
    b += p.sigma_b;
    c += p.sigma_c;
    d += p.sigma_d;
    cd += p.sigma_c && p.sigma_d;
    s.coupling_violations += !coupling_holds(p);
    switch (check_domination(p, ensemble.params)) {
    case DominationOutcome::Holds:
      ++s.domination_checked;
      break;
    case DominationOutcome::Violated:
      ++s.domination_checked;
      ++s.domination_violations;
      break;
    case DominationOutcome::Vacuous:
      break;
    case DominationOutcome::Skipped:
      s.domination_skipped = true;
      break;
    }
  }
  const double total = static_cast<double>(s.paths);
  s.freq_a = static_cast<double>(a) / total;
  s.freq_b = static_cast<double>(b) / total;
  s.freq_c = static_cast<double>(c) / total;
  s.freq_d = static_cast<double>(d) / total;
  s.freq_c_and_d = static_cast<double>(cd) / total;
  s.target = 1.0 - ensemble.params.eps_prime;
  s.target_met = s.freq_c_and_d >= s.target;
  return s;
}

} // namespace delpolar
