#include "delpolar/experiment/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace delpolar::experiment {

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string format_uint(std::uint64_t v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(path), columns_(header.size()) {
  if (!out_)
    throw std::runtime_error("cannot write " + path.string());
  for (std::string_view h : header)
    cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (filled_ > 0)
    out_ << ',';
  out_ << text;
  ++filled_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }
CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::string_view(format_uint(v))); }
CsvWriter& CsvWriter::cell(int v) { return cell(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
  if (filled_ != columns_)
    throw std::logic_error("CsvWriter: row width does not match the header");
  out_ << '\n';
  filled_ = 0;
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string hex;
  for (std::size_t k = 0; k < bits.size(); k += 4) {
    int nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (k + j < bits.size())
        nibble |= bits[k + j] & 1;
    }
    hex.push_back(digits[nibble]);
  }
  return hex;
}

Bits hex_to_bits(std::string_view hex, std::size_t length) {
  if (hex.size() * 4 < length)
    throw std::invalid_argument("hex string too short for the stated length");
  Bits bits;
  bits.reserve(length);
  for (char ch : hex) {
    int v = 0;
    if (ch >= '0' && ch <= '9')
      v = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F')
      v = ch - 'A' + 10;
    else
      throw std::invalid_argument(std::string("not a hex digit: ") + ch);
    for (int j = 3; j >= 0 && bits.size() < length; --j)
      bits.push_back(static_cast<std::uint8_t>((v >> j) & 1));
  }
  return bits;
}

namespace {

double parse_double(const std::string& text, const std::filesystem::path& path) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::runtime_error(path.string() + ": bad number '" + text + "'");
  return v;
}

} // namespace

void write_frozen_csv(const std::filesystem::path& path, const FrozenSpec& spec) {
  CsvWriter csv(path, {"i", "z_estimate", "k_value", "class"});
  for (std::size_t k = 0; k < spec.length(); ++k) {
    csv.cell(static_cast<std::uint64_t>(k + 1))
        .cell(k < spec.z_estimates.size() ? spec.z_estimates[k] : 1.0)
        .cell(k < spec.k_values.size() ? spec.k_values[k] : 0.0)
        .cell(bit_class_name(spec.classes[k]));
    csv.end_row();
  }
}

FrozenSpec read_frozen_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("i,z_estimate,k_value,class", 0) != 0)
    throw std::runtime_error(path.string() + ": unexpected header");
  FrozenSpec spec;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::stringstream row(line);
    std::string i, z, k, cls;
    if (!std::getline(row, i, ',') || !std::getline(row, z, ',') || !std::getline(row, k, ',') ||
        !std::getline(row, cls, ','))
      throw std::runtime_error(path.string() + ": short row");
    if (std::stoul(i) != spec.length() + 1)
      throw std::runtime_error(path.string() + ": indices must run 1, 2, ...");
    BitClass c;
    if (cls == "info")
      c = BitClass::Info;
    else if (cls == "frozen")
      c = BitClass::Frozen;
    else if (cls == "shaped")
      c = BitClass::Shaped;
    else
      throw std::runtime_error(path.string() + ": unknown class '" + cls + "'");
    spec.classes.push_back(c);
    spec.frozen_values.push_back(0);
    spec.z_estimates.push_back(parse_double(z, path));
    spec.k_values.push_back(parse_double(k, path));
  }
  if (!is_power_of_two(spec.length()))
    throw std::runtime_error(path.string() + ": length must be a power of two");
  spec.rate = static_cast<double>(spec.info_count()) / static_cast<double>(spec.length());
  return spec;
}

} // namespace delpolar::experiment
