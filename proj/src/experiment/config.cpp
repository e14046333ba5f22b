#include "delpolar/experiment/config.hpp"

#include <cmath>
#include <fstream>

namespace delpolar::experiment {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null())
    return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void require_object(const json& obj, const char* what) {
  if (!obj.is_object())
    throw ConfigError(std::string("config: '") + what + "' must be an object");
}

} // namespace

void check_xi(double xi) {
  if (!(xi > 0.0 && xi < 1.0))
    throw ConfigError("config: xi must lie in (0,1)");
  const double scaled = std::ldexp(xi, 20);
  if (scaled != std::floor(scaled))
    throw ConfigError("config: xi must be a binary fraction with at most 20 fractional bits");
}

SourceModel parse_source(const json& spec) {
  require_object(spec, "source");
  const std::string kind = get_or<std::string>(spec, "kind", "uniform");
  try {
    if (kind == "uniform")
      return SourceModel::uniform();
    if (kind == "markov") {
      if (!spec.contains("transition") || !spec.contains("emit"))
        throw ConfigError("config: markov source needs 'transition' and 'emit'");
      auto transition = spec.at("transition").get<std::vector<std::vector<double>>>();
      auto emit_int = spec.at("emit").get<std::vector<int>>();
      std::vector<std::uint8_t> emit;
      for (int b : emit_int) {
        if (b != 0 && b != 1)
          throw ConfigError("config: 'emit' entries must be 0 or 1");
        emit.push_back(static_cast<std::uint8_t>(b));
      }
      return SourceModel::markov(std::move(transition), std::move(emit),
                                 get_or<int>(spec, "tau", 1), get_or<double>(spec, "p0", 0.9));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad source: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unknown source kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "document");
  ExperimentConfig c;
  c.base_dir = base_dir;
  c.n = get_or<int>(doc, "n", c.n);
  c.n0 = get_or<int>(doc, "n0", c.n0);
  c.xi = get_or<double>(doc, "xi", c.xi);
  c.delta = get_or<double>(doc, "delta", c.delta);
  c.trials = get_or<std::size_t>(doc, "trials", c.trials);
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  c.workers = get_or<unsigned>(doc, "workers", c.workers);
  if (doc.contains("source")) {
    c.source_json = doc.at("source");
    c.source = parse_source(c.source_json);
  }

  if (c.n0 < 0 || c.n < c.n0)
    throw ConfigError("config: need n >= n0 >= 0");
  if (c.n > 16)
    throw ConfigError("config: n above 16 is not supported");
  if (!(c.delta >= 0.0 && c.delta < 1.0))
    throw ConfigError("config: delta must lie in [0,1)");
  check_xi(c.xi);
  if (c.trials < 1)
    throw ConfigError("config: trials must be at least 1");
  if (c.workers < 1)
    throw ConfigError("config: workers must be at least 1");

  if (doc.contains("design")) {
    const json& d = doc.at("design");
    require_object(d, "design");
    c.design.design_trials = get_or<std::size_t>(d, "design_trials", c.design.design_trials);
    c.design.target_rate = get_or<double>(d, "target_rate", c.design.target_rate);
    c.design.k_threshold = get_or<double>(d, "k_threshold", c.design.k_threshold);
    c.design.clamp_cap = get_or<double>(d, "clamp_cap", c.design.clamp_cap);
    if (d.contains("frozen_file") && !d.at("frozen_file").is_null())
      c.design.frozen_file = base_dir / d.at("frozen_file").get<std::string>();
    if (!(c.design.target_rate > 0.0 && c.design.target_rate <= 1.0))
      throw ConfigError("config: design.target_rate must lie in (0,1]");
    if (c.design.design_trials < 1)
      throw ConfigError("config: design.design_trials must be at least 1");
  }
  if (doc.contains("fer")) {
    require_object(doc.at("fer"), "fer");
    c.fer.record_timing = get_or<bool>(doc.at("fer"), "record_timing", false);
  }
  if (doc.contains("encode")) {
    const json& e = doc.at("encode");
    require_object(e, "encode");
    if (e.contains("x_hex"))
      c.encode.x_hex = e.at("x_hex").get<std::string>();
    if (e.contains("message_hex"))
      c.encode.message_hex = e.at("message_hex").get<std::string>();
  }
  if (doc.contains("decode")) {
    const json& d = doc.at("decode");
    require_object(d, "decode");
    c.decode.y_hex = get_or<std::string>(d, "y_hex", "");
    c.decode.y_length = get_or<std::size_t>(d, "y_length", 0);
  }
  if (doc.contains("gbm")) {
    const json& g = doc.at("gbm");
    require_object(g, "gbm");
    c.gbm.trials = get_or<std::size_t>(g, "trials", 0);
    if (g.contains("grid")) {
      for (const json& p : g.at("grid")) {
        GbmPoint pt;
        pt.n = get_or<int>(p, "n", c.n);
        pt.n0 = get_or<int>(p, "n0", c.n0);
        pt.xi = get_or<double>(p, "xi", c.xi);
        pt.delta = get_or<double>(p, "delta", c.delta);
        if (pt.n0 < 0 || pt.n <= pt.n0)
          throw ConfigError("config: gbm grid points need n > n0 >= 0");
        if (!(pt.delta >= 0.0 && pt.delta < 1.0))
          throw ConfigError("config: gbm grid delta must lie in [0,1)");
        check_xi(pt.xi);
        c.gbm.grid.push_back(pt);
      }
    }
  }
  if (doc.contains("lab")) {
    const json& l = doc.at("lab");
    require_object(l, "lab");
    ProcessParams& p = c.lab.params;
    p.kappa = get_or<double>(l, "kappa", p.kappa);
    p.d = get_or<double>(l, "d", p.d);
    p.gamma = get_or<double>(l, "gamma", p.gamma);
    p.beta = get_or<double>(l, "beta", p.beta);
    p.nu = get_or<double>(l, "nu", p.nu);
    p.eps_prime = get_or<double>(l, "eps_prime", p.eps_prime);
    p.n_w = get_or<int>(l, "n_w", p.n_w);
    p.n_max = get_or<int>(l, "n_max", p.n_max);
    p.gamma_a = get_or<double>(l, "gamma_a", p.gamma_a);
    p.nu_b = get_or<double>(l, "nu_b", p.nu_b);
    p.m_th = get_or<double>(l, "m_th", p.m_th);
    p.n_r = get_or<int>(l, "n_r", p.n_r);
    p.start_factor = get_or<double>(l, "start_factor", p.start_factor);
    p.slack = get_or<double>(l, "slack", p.slack);
    c.lab.paths = get_or<std::size_t>(l, "paths", c.lab.paths);
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.lab.paths < 1)
      throw ConfigError("config: lab.paths must be at least 1");
  }
  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    require_object(o, "oracle");
    c.oracle.posterior_trials = get_or<std::size_t>(o, "posterior_trials", c.oracle.posterior_trials);
    c.oracle.implication_traces =
        get_or<std::size_t>(o, "implication_traces", c.oracle.implication_traces);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".")
                                                       : path.parent_path());
}

} // namespace delpolar::experiment
