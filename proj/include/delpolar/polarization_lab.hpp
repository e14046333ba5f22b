#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "delpolar/ext_float.hpp"
#include "delpolar/random.hpp"
#include "delpolar/source.hpp"

namespace delpolar {

struct ProcessParams {
  double kappa = 3.0;
  double d = 1.0;
  double gamma = 2.0 / 3.0;
  double beta = 0.45;
  double nu = 0.3;
  double eps_prime = 0.1;
  int n_w = 8;
  int n_max = 24;
  double gamma_a = 0.52;
  double nu_b = 0.25;
  double m_th = 0.0;
  int n_r = 12; // start of the horizon for Sigma_c
  /// Z_{n_w} = start_factor * 2^{-(2^{n_w})^nu}; the bound is attained at 1.
  double start_factor = 0.5;
  /// Z_{n+1} = slack * (worst-case right side); 1 attains the bound.
  double slack = 1.0;

  /// Throws std::invalid_argument on values the recursions cannot use.
  void validate() const;
  /// 1/2 < gamma_a < gamma and 0 < nu_b < nu < 1/3.
  bool ordering_holds() const;
  /// ceil(1 / (gamma - gamma_a)).
  int domination_threshold() const;
};

/// kappa N^d z + 2^{-N^gamma} (b = 0) or kappa N^d z^2 + 2^{-N^gamma}
/// (b = 1), N = 2^n.
ExtFloat step_process(const ExtFloat& z, int n, std::uint8_t b, const ProcessParams& params);

/// The four coupled trajectories on one draw of B_{n_w+1}, ..., B_{n_max}.
/// Entry k of every trajectory is the value at level n_w + k.
struct ProcessPath {
  Bits b;
  std::vector<ExtFloat> z, z_prime, z_second, z_bar;
  bool sigma_a = false, sigma_b = false, sigma_c = false, sigma_d = false;
  /// Last level where Z_n >= 2^{-N^beta}, or n_w - 1 if none.
  int last_slow_level = 0;
};

ProcessPath simulate_path(const ProcessParams& params, std::span<const std::uint8_t> b);
ProcessPath sample_path(const ProcessParams& params, Rng& rng);

/// Z <= Z' <= Z'' at every level.
bool coupling_holds(const ProcessPath& path);

enum class DominationOutcome { Holds, Violated, Vacuous, Skipped };

/// Z <= Z'' <= Z_bar on a path where Sigma_a holds; Skipped when n_w is
/// below the domination threshold or the starting values are not ordered.
DominationOutcome check_domination(const ProcessPath& path, const ProcessParams& params);

struct Ensemble {
  ProcessParams params;
  std::vector<ProcessPath> paths;
};

Ensemble simulate_paths(const ProcessParams& params, std::size_t paths, std::uint64_t seed,
                        unsigned workers = 1);

struct RunningCurve {
  std::vector<int> n_r;
  std::vector<double> fraction;
};

/// Fraction of paths with Z_n < 2^{-N^beta} for every n in [n_r, n_max].
RunningCurve running_fraction(const Ensemble& ensemble);

struct SigmaStats {
  std::size_t paths = 0;
  double freq_a = 0.0, freq_b = 0.0, freq_c = 0.0, freq_d = 0.0;
  double freq_c_and_d = 0.0;
  double target = 0.0;            // 1 - eps'
  bool target_met = false;        // informational only
  std::size_t coupling_violations = 0;
  std::size_t domination_checked = 0;
  std::size_t domination_violations = 0;
  bool domination_skipped = false;
};

/// Throws std::invalid_argument on an empty ensemble.
SigmaStats sigma_event_stats(const Ensemble& ensemble);

} // namespace delpolar
