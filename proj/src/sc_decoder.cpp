#include "delpolar/sc_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace delpolar {

const char* bit_class_name(BitClass c) {
  switch (c) {
  case BitClass::Info:
    return "info";
  case BitClass::Frozen:
    return "frozen";
  case BitClass::Shaped:
    return "shaped";
  }
  return "info";
}

FrozenSpec FrozenSpec::all_info(std::size_t length) {
  FrozenSpec s;
  s.classes.assign(length, BitClass::Info);
  s.frozen_values.assign(length, 0);
  return s;
}

std::size_t FrozenSpec::info_count() const {
  return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), BitClass::Info));
}

bool FrozenSpec::has_shaped() const {
  return std::find(classes.begin(), classes.end(), BitClass::Shaped) != classes.end();
}

double LeafValues::posterior_one() const {
  if (log_w0 == -std::numeric_limits<double>::infinity() &&
      log_w1 == -std::numeric_limits<double>::infinity())
    return 0.5;
  return 1.0 / (1.0 + std::exp(log_w0 - log_w1));
}

namespace {

Bits descend(std::vector<Trellis> lanes, std::size_t& next_index, const LeafPolicy& policy,
             std::uint64_t* ops) {
  if (lanes.front().section_count() == 1) {
    std::vector<LeafValues> values;
    values.reserve(lanes.size());
    for (const Trellis& t : lanes)
      values.push_back({leaf_log_weight(t, 0), leaf_log_weight(t, 1)});
    return Bits{policy(next_index++, values)};
  }
  std::vector<Trellis> minus;
  minus.reserve(lanes.size());
  for (const Trellis& t : lanes)
    minus.push_back(minus_transform(t, ops));
  const Bits a = descend(std::move(minus), next_index, policy, ops);

  std::vector<Trellis> plus;
  plus.reserve(lanes.size());
  for (const Trellis& t : lanes)
    plus.push_back(plus_transform(t, a, ops));
  lanes.clear();
  const Bits b = descend(std::move(plus), next_index, policy, ops);

  Bits labels(2 * a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    labels[2 * k] = a[k] ^ b[k];
    labels[2 * k + 1] = b[k];
  }
  return labels;
}

} // namespace

Bits run_successive_cancellation(std::vector<Trellis> lanes, const LeafPolicy& policy,
                                 std::uint64_t* ops) {
  if (lanes.empty())
    throw std::invalid_argument("successive cancellation needs at least one trellis");
  std::size_t next_index = 1;
  return descend(std::move(lanes), next_index, policy, ops);
}

DecodeResult sc_decode(std::span<const std::uint8_t> y, const GuardLayout& layout,
                       const SourceModel& model, double delta, const FrozenSpec& spec) {
  const std::size_t big_n = layout.data_length();
  if (spec.length() != big_n)
    throw std::invalid_argument("sc_decode: frozen spec length does not match the code");
  DecodeResult r;
  r.u_hat.resize(big_n);
  r.posterior_one.resize(big_n);
  r.log_w0.resize(big_n);
  r.log_w1.resize(big_n);

  std::vector<Trellis> lanes;
  lanes.push_back(build_base_trellis(y, layout, model, delta, &r.ops));
  if (spec.has_shaped())
    lanes.push_back(build_source_trellis(layout.n, layout.n0, model));

  const LeafPolicy policy = [&](std::size_t i, std::span<const LeafValues> v) -> std::uint8_t {
    const std::size_t k = i - 1;
    r.log_w0[k] = v[0].log_w0;
    r.log_w1[k] = v[0].log_w1;
    r.posterior_one[k] = v[0].posterior_one();
    std::uint8_t bit = 0;
    switch (spec.classes[k]) {
    case BitClass::Info:
      bit = v[0].argmax();
      break;
    case BitClass::Frozen:
      bit = spec.frozen_values[k];
      break;
    case BitClass::Shaped:
      bit = v[1].argmax();
      break;
    }
    r.u_hat[k] = bit;
    return bit;
  };
  r.labels = run_successive_cancellation(std::move(lanes), policy, &r.ops);
  r.x_hat = arikan_transform(r.u_hat);
  return r;
}

Encoded polar_encode(std::span<const std::uint8_t> message, const FrozenSpec& spec,
                     const SourceModel& model, int n, int n0) {
  const std::size_t big_n = std::size_t{1} << n;
  if (spec.length() != big_n)
    throw std::invalid_argument("polar_encode: frozen spec length does not match the code");
  if (message.size() != spec.info_count())
    throw std::invalid_argument("polar_encode: message length must equal the info count");
  Encoded e;
  e.u.assign(big_n, 0);
  std::size_t next = 0;
  if (!spec.has_shaped()) {
    for (std::size_t k = 0; k < big_n; ++k) {
      if (spec.classes[k] == BitClass::Info)
        e.u[k] = message[next++];
      else
        e.u[k] = spec.frozen_values[k];
    }
  } else {
    std::vector<Trellis> lanes;
    lanes.push_back(build_source_trellis(n, n0, model));
    const LeafPolicy policy = [&](std::size_t i, std::span<const LeafValues> v) -> std::uint8_t {
      const std::size_t k = i - 1;
      std::uint8_t bit = 0;
      switch (spec.classes[k]) {
      case BitClass::Info:
        bit = message[next++];
        break;
      case BitClass::Frozen:
        bit = spec.frozen_values[k];
        break;
      case BitClass::Shaped:
        bit = v[0].argmax();
        break;
      }
      e.u[k] = bit;
      return bit;
    };
    run_successive_cancellation(std::move(lanes), policy);
  }
  e.x = arikan_transform(e.u);
  return e;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("op_count_bound: value exceeds 64 bits");
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r))
    throw std::overflow_error("op_count_bound: value exceeds 64 bits");
  return r;
}

} // namespace

std::uint64_t op_count_bound(int n, std::uint64_t big_n, std::uint64_t states) {
  if (n < 0 || n >= 62)
    throw std::overflow_error("op_count_bound: level out of range");
  std::uint64_t total = 0;
  const std::uint64_t cube = checked_mul(checked_mul(states, states), states);
  for (int j = 0; j < n; ++j) {
    const std::uint64_t p = std::uint64_t{1} << j;
    std::uint64_t term = checked_mul(2 * p, 8);
    term = checked_mul(term, big_n);
    term = checked_mul(term, cube);
    term = checked_mul(term, checked_mul(p + 1, p + 1));
    term = checked_mul(term, std::uint64_t{1} << (n - j));
    total = checked_add(total, term);
  }
  return total;
}

} // namespace delpolar
