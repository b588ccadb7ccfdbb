#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cmlptr/tensor.hpp"

namespace cmlptr {

/// CMT1 layout: "CMT1", dtype byte (0x01 = f64 LE), ndim byte (2 or 3),
/// ndim x u64 LE extents, then the row-major f64 LE payload.
inline constexpr std::uint8_t kDtypeFloat64 = 0x01;

using TensorData = std::variant<Tensor3, Matrix>;

std::vector<std::uint8_t> encode_tensor(const Tensor3& t);
std::vector<std::uint8_t> encode_tensor(const Matrix& m);
TensorData decode_tensor(std::span<const std::uint8_t> bytes);

TensorData read_tensor(const std::filesystem::path& path);
/// read_tensor that insists on a 3-way tensor / a matrix.
Tensor3 read_tensor3(const std::filesystem::path& path);
Matrix read_matrix(const std::filesystem::path& path);

void write_tensor(const std::filesystem::path& path, const Tensor3& t);
void write_tensor(const std::filesystem::path& path, const Matrix& m);

/// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Band-sequential ENVI raster described by a .hdr file. Supported data types:
/// 1 (u8), 2 (i16), 3 (i32), 4 (f32), 5 (f64), 12 (u16). Result is
/// lines x samples x bands.
Tensor3 read_envi(const std::filesystem::path& header_path);

}  // namespace cmlptr
