#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delpolar/sc_decoder.hpp"
#include "delpolar/source.hpp"

namespace delpolar::experiment {

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double v);
std::string format_uint(std::uint64_t v);

class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(int v);
  void end_row();

private:
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

/// Bits packed most significant first into hex digits, zero padded at the
/// end; the length travels separately.
std::string bits_to_hex(std::span<const std::uint8_t> bits);
/// Throws std::invalid_argument on a non-hex digit or a short string.
Bits hex_to_bits(std::string_view hex, std::size_t length);

/// bhatt.csv: i, z_estimate, k_value, class.
void write_frozen_csv(const std::filesystem::path& path, const FrozenSpec& spec);
/// Throws std::runtime_error on a malformed file.
FrozenSpec read_frozen_csv(const std::filesystem::path& path);

} // namespace delpolar::experiment
