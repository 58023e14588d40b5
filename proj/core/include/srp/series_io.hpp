#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "srp/signal.hpp"

namespace srp::io {

inline constexpr std::uint32_t kSeriesVersion = 1;

// CSV body `t,value` plus a sidecar `<stem>.json` with {sample_rate_hz, domain}.
void write_csv(const std::filesystem::path& csv_path, const TimeSeries& series);
TimeSeries read_csv(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// Packed little-endian container:
//   "SRPTS\0\0\0" | u32 version | f64 sample_rate | u8 domain | u64 count | count x f32
void write_binary(std::ostream& out, const TimeSeries& series);
TimeSeries read_binary(std::istream& in);
void write_binary(const std::filesystem::path& path, const TimeSeries& series);
TimeSeries read_binary(const std::filesystem::path& path);

/// Dispatches on extension: `.csv` uses the CSV pair, anything else the binary format.
TimeSeries read_series(const std::filesystem::path& path);
void write_series(const std::filesystem::path& path, const TimeSeries& series);

// Little-endian primitives shared with the checkpoint container.
void put_u8(std::ostream& out, std::uint8_t v);
void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f32(std::ostream& out, float v);
void put_f64(std::ostream& out, double v);
std::uint8_t get_u8(std::istream& in);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
float get_f32(std::istream& in);
double get_f64(std::istream& in);

}  // namespace srp::io
