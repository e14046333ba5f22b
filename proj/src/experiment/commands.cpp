#include "delpolar/experiment/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "delpolar/analysis.hpp"
#include "delpolar/channels.hpp"
#include "delpolar/experiment/csv.hpp"
#include "delpolar/experiment/oracle_battery.hpp"
#include "delpolar/parallel.hpp"
#include "delpolar/polarization_lab.hpp"
#include "delpolar/random.hpp"

namespace delpolar::experiment {

using nlohmann::json;

namespace {

json bits_json(std::span<const std::uint8_t> bits) {
  return json{{"length", bits.size()}, {"hex", bits_to_hex(bits)}};
}

json provenance_runs(const GuardLayout& layout) {
  json runs = json::array();
  std::size_t k = 0;
  while (k < layout.total_length()) {
    const Provenance p = layout.provenance[k];
    std::size_t len = 0;
    while (k < layout.total_length() && layout.provenance[k] == p) {
      ++len;
      ++k;
    }
    runs.push_back({{"kind", p.is_guard() ? "guard" : "block"}, {"id", p.id}, {"length", len}});
  }
  return runs;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

} // namespace

FrozenSpec frozen_spec_for(const ExperimentConfig& config, const GuardLayout& layout) {
  if (config.design.frozen_file) {
    FrozenSpec spec;
    try {
      spec = read_frozen_csv(*config.design.frozen_file);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (spec.length() != layout.data_length())
      throw ConfigError("config: frozen file length does not match 2^n");
    return spec;
  }
  DesignOptions opts;
  opts.design_trials = config.design.design_trials;
  opts.rate = config.design.target_rate;
  opts.k_threshold = config.design.k_threshold;
  opts.seed = config.seed;
  opts.workers = config.workers;
  opts.clamp_cap = config.design.clamp_cap;
  return design_frozen_set(layout, config.source, config.delta, opts).spec;
}

std::vector<TrialRecord> fer_trials(const ExperimentConfig& config, const FrozenSpec& spec) {
  const GuardLayout layout = make_guard_layout(config.n, config.n0, config.xi);
  std::vector<TrialRecord> records(config.trials);
  parallel_for(config.trials, config.workers, [&](std::size_t t) {
    Rng rng(derive_trial_seed(config.seed, "fer", t));
    const BlockedInput x = sample_blocked_input(config.source, config.n, config.n0, rng);
    const Bits u = arikan_transform(x.bits);
    FrozenSpec trial_spec = spec;
    for (std::size_t k = 0; k < u.size(); ++k)
      if (trial_spec.classes[k] == BitClass::Frozen)
        trial_spec.frozen_values[k] = u[k];
    const GuardedWord g = place_in_layout(layout, x.bits);
    const ChannelTrace trace = transmit(g, config.delta, rng);

    const auto start = std::chrono::steady_clock::now();
    const DecodeResult dec = sc_decode(trace.y, layout, config.source, config.delta, trial_spec);
    const auto stop = std::chrono::steady_clock::now();

    if (dec.labels != dec.x_hat)
      throw InvariantViolation("fer: decided labels disagree with the transform of u_hat");
    TrialRecord& r = records[t];
    r.id = t;
    for (std::size_t k = 0; k < x.bits.size(); ++k)
      r.bit_errors += dec.x_hat[k] != x.bits[k];
    r.block_error = r.bit_errors > 0;
    r.received_length = trace.y.size();
    r.gbm = trace.has_outer_guard && gbm_event(trace);
    r.decode_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    if (config.delta == 0.0 && r.block_error)
      throw InvariantViolation("fer: decoding failed on a noiseless channel");
  });
  return records;
}

GbmRow gbm_point_stats(const GbmPoint& point, const SourceModel& model, std::size_t trials,
                       std::uint64_t seed, unsigned workers) {
  const GuardLayout layout = make_guard_layout(point.n, point.n0, point.xi);
  std::vector<EventRecord> events(trials);
  std::vector<std::uint8_t> gbm(trials), implication(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng rng(derive_trial_seed(seed, "gbm", t));
    const BlockedInput x = sample_blocked_input(model, point.n, point.n0, rng);
    const ChannelTrace trace = transmit(place_in_layout(layout, x.bits), point.delta, rng);
    events[t] = classify_events(trace);
    gbm[t] = gbm_event(trace);
    implication[t] = check_gbm_implication(trace);
  });
  GbmRow row;
  row.point = point;
  row.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    row.gbm_count += gbm[t];
    row.not_a += !events[t].a;
    row.not_a_t += !events[t].a_t;
    row.not_b += !events[t].b;
    row.not_c += !events[t].c;
    row.not_c_t += !events[t].c_t;
    row.implication_violations += !implication[t];
  }
  row.bound_total = gbm_bound(point.n, point.n0, point.xi, point.delta, model).total;
  return row;
}

int run_encode(const ExperimentConfig& config, const std::filesystem::path& out) {
  const GuardLayout layout = make_guard_layout(config.n, config.n0, config.xi);
  const std::size_t big_n = layout.data_length();
  json doc{{"n", config.n}, {"n0", config.n0}, {"xi", config.xi}};
  Bits x;
  if (config.encode.message_hex) {
    const FrozenSpec spec = frozen_spec_for(config, layout);
    Bits message;
    try {
      message = hex_to_bits(*config.encode.message_hex, spec.info_count());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: encode.message_hex: ") + e.what());
    }
    const Encoded enc = polar_encode(message, spec, config.source, config.n, config.n0);
    doc["message"] = bits_json(message);
    doc["u"] = bits_json(enc.u);
    x = enc.x;
  } else if (config.encode.x_hex) {
    try {
      x = hex_to_bits(*config.encode.x_hex, big_n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: encode.x_hex: ") + e.what());
    }
  } else {
    Rng rng(derive_trial_seed(config.seed, "encode", 0));
    x = sample_blocked_input(config.source, config.n, config.n0, rng).bits;
  }
  const GuardedWord g = place_in_layout(layout, x);
  doc["x"] = bits_json(x);
  doc["codeword"] = bits_json(g.symbols);
  doc["provenance"] = provenance_runs(layout);
  write_json(out / "encode.json", doc);
  return 0;
}

int run_decode(const ExperimentConfig& config, const std::filesystem::path& out) {
  const GuardLayout layout = make_guard_layout(config.n, config.n0, config.xi);
  Bits y;
  try {
    y = hex_to_bits(config.decode.y_hex, config.decode.y_length);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: decode.y_hex: ") + e.what());
  }
  if (y.size() > layout.total_length())
    throw ConfigError("config: decode.y_length exceeds the codeword length");
  const FrozenSpec spec = frozen_spec_for(config, layout);
  const DecodeResult dec = sc_decode(y, layout, config.source, config.delta, spec);
  if (!dec.log_w0.empty() && std::isinf(dec.log_w0[0]) && std::isinf(dec.log_w1[0]))
    throw ConfigError("decode: the received word has probability zero for this code and channel");

  json doc{{"n", config.n},
           {"n0", config.n0},
           {"xi", config.xi},
           {"delta", config.delta},
           {"y", bits_json(y)},
           {"u_hat", bits_json(dec.u_hat)},
           {"x_hat", bits_json(dec.x_hat)},
           {"operations", dec.ops}};
  write_json(out / "decode.json", doc);

  CsvWriter csv(out / "posteriors.csv", {"i", "class", "log_w0", "log_w1", "posterior_one", "u_hat"});
  for (std::size_t k = 0; k < dec.u_hat.size(); ++k) {
    csv.cell(static_cast<std::uint64_t>(k + 1))
        .cell(bit_class_name(spec.classes[k]))
        .cell(dec.log_w0[k])
        .cell(dec.log_w1[k])
        .cell(dec.posterior_one[k])
        .cell(static_cast<int>(dec.u_hat[k]));
    csv.end_row();
  }
  if (dec.labels != dec.x_hat)
    throw InvariantViolation("decode: decided labels disagree with the transform of u_hat");
  return 0;
}

int run_fer(const ExperimentConfig& config, const std::filesystem::path& out) {
  const GuardLayout layout = make_guard_layout(config.n, config.n0, config.xi);
  const FrozenSpec spec = frozen_spec_for(config, layout);
  const std::vector<TrialRecord> records = fer_trials(config, spec);

  CsvWriter csv(out / "fer.csv", {"n", "n0", "xi", "delta", "rate", "trials", "errors", "fer",
                                  "seed", "mean_decode_ms"});
  std::size_t errors = 0;
  double total_ms = 0.0;
  for (const TrialRecord& r : records) {
    errors += r.block_error;
    total_ms += r.decode_ms;
    const std::uint64_t done = r.id + 1;
    csv.cell(config.n).cell(config.n0).cell(config.xi).cell(config.delta).cell(spec.rate);
    csv.cell(done).cell(static_cast<std::uint64_t>(errors));
    csv.cell(static_cast<double>(errors) / static_cast<double>(done));
    csv.cell(config.seed);
    if (config.fer.record_timing)
      csv.cell(total_ms / static_cast<double>(done));
    else
      csv.cell(std::string_view("NA"));
    csv.end_row();
  }
  return 0;
}

int run_design_frozen(const ExperimentConfig& config, const std::filesystem::path& out) {
  const GuardLayout layout = make_guard_layout(config.n, config.n0, config.xi);
  DesignOptions opts;
  opts.design_trials = config.design.design_trials;
  opts.rate = config.design.target_rate;
  opts.k_threshold = config.design.k_threshold;
  opts.seed = config.seed;
  opts.workers = config.workers;
  opts.clamp_cap = config.design.clamp_cap;
  const DesignResult result = design_frozen_set(layout, config.source, config.delta, opts);
  write_frozen_csv(out / "bhatt.csv", result.spec);
  return 0;
}

int run_gbm_stats(const ExperimentConfig& config, const std::filesystem::path& out) {
  std::vector<GbmPoint> grid = config.gbm.grid;
  if (grid.empty()) {
    if (config.n <= config.n0)
      throw ConfigError("config: gbm-stats needs n > n0");
    grid.push_back({config.n, config.n0, config.xi, config.delta});
  }
  const std::size_t trials = config.gbm.trials > 0 ? config.gbm.trials : config.trials;

  CsvWriter csv(out / "gbm.csv", {"n", "n0", "xi", "delta", "trials", "gbm_count", "notA",
                                  "notAprime", "notB", "notC", "notCprime",
                                  "implication_violations", "bound_total"});
  std::size_t violations = 0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const std::uint64_t point_seed = derive_trial_seed(config.seed, "gbm-point", p);
    const GbmRow row = gbm_point_stats(grid[p], config.source, trials, point_seed, config.workers);
    violations += row.implication_violations;
    csv.cell(row.point.n).cell(row.point.n0).cell(row.point.xi).cell(row.point.delta);
    for (std::size_t v : {row.trials, row.gbm_count, row.not_a, row.not_a_t, row.not_b, row.not_c,
                          row.not_c_t, row.implication_violations})
      csv.cell(static_cast<std::uint64_t>(v));
    csv.cell(row.bound_total);
    csv.end_row();
  }
  if (violations > 0) {
    std::cerr << "gbm-stats: " << violations << " traces violate the event implication\n";
    return 2;
  }
  return 0;
}

int run_polarization_lab(const ExperimentConfig& config, const std::filesystem::path& out) {
  const Ensemble ens =
      simulate_paths(config.lab.params, config.lab.paths, config.seed, config.workers);
  const RunningCurve curve = running_fraction(ens);
  const SigmaStats stats = sigma_event_stats(ens);

  CsvWriter lab(out / "lab.csv", {"n_r", "fraction_running", "paths"});
  bool monotone = true;
  for (std::size_t k = 0; k < curve.n_r.size(); ++k) {
    lab.cell(curve.n_r[k]).cell(curve.fraction[k]).cell(static_cast<std::uint64_t>(ens.paths.size()));
    lab.end_row();
    if (k > 0 && curve.fraction[k] < curve.fraction[k - 1])
      monotone = false;
  }

  CsvWriter sigma(out / "sigma.csv",
                  {"paths", "freq_a", "freq_b", "freq_c", "freq_d", "freq_c_and_d", "target",
                   "target_met", "coupling_violations", "domination_checked",
                   "domination_violations", "domination_skipped"});
  sigma.cell(static_cast<std::uint64_t>(stats.paths))
      .cell(stats.freq_a)
      .cell(stats.freq_b)
      .cell(stats.freq_c)
      .cell(stats.freq_d)
      .cell(stats.freq_c_and_d)
      .cell(stats.target)
      .cell(std::string_view(stats.target_met ? "true" : "false"))
      .cell(static_cast<std::uint64_t>(stats.coupling_violations))
      .cell(static_cast<std::uint64_t>(stats.domination_checked))
      .cell(static_cast<std::uint64_t>(stats.domination_violations))
      .cell(std::string_view(stats.domination_skipped ? "true" : "false"));
  sigma.end_row();

  if (stats.coupling_violations > 0 || stats.domination_violations > 0 || !monotone) {
    std::cerr << "polarization-lab: coupling " << stats.coupling_violations << ", domination "
              << stats.domination_violations << (monotone ? "" : ", running curve not monotone")
              << '\n';
    return 2;
  }
  return 0;
}

int run_oracle_check(const ExperimentConfig& config, const std::filesystem::path& out) {
  OracleOptions opts;
  opts.seed = config.seed;
  opts.posterior_trials = config.oracle.posterior_trials;
  opts.implication_traces = config.oracle.implication_traces;
  opts.workers = config.workers;
  const std::vector<CheckResult> results = run_oracle_battery(opts);

  CsvWriter csv(out / "oracle.csv", {"check", "passed", "detail"});
  bool all = true;
  for (const CheckResult& r : results) {
    csv.cell(r.name).cell(std::string_view(r.passed ? "true" : "false")).cell(r.detail);
    csv.end_row();
    std::cout << (r.passed ? "ok   " : "FAIL ") << r.name << "  " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? 0 : 2;
}

int run_command(const CommandLine& cl) {
  try {
    ExperimentConfig config = load_config(cl.config);
    if (cl.seed)
      config.seed = *cl.seed;
    if (cl.workers) {
      if (*cl.workers < 1)
        throw ConfigError("--workers must be at least 1");
      config.workers = *cl.workers;
    }
    std::error_code ec;
    std::filesystem::create_directories(cl.out, ec);
    if (ec)
      throw ConfigError("cannot create output directory " + cl.out.string());

    if (cl.command == "encode")
      return run_encode(config, cl.out);
    if (cl.command == "decode")
      return run_decode(config, cl.out);
    if (cl.command == "fer")
      return run_fer(config, cl.out);
    if (cl.command == "design-frozen")
      return run_design_frozen(config, cl.out);
    if (cl.command == "gbm-stats")
      return run_gbm_stats(config, cl.out);
    if (cl.command == "polarization-lab")
      return run_polarization_lab(config, cl.out);
    if (cl.command == "oracle-check")
      return run_oracle_check(config, cl.out);
    throw ConfigError("unknown command '" + cl.command + "'");
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace delpolar::experiment
