#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "scatterkit/crossorient.hpp"
#include "scatterkit/image.hpp"

namespace scatterkit {

// File layout (little-endian):
//   "SKT1" | dtype u8 | ndim u8 | ndim x u32 dims | row-major payload
// Complex values are stored as interleaved (real, imaginary).
enum class DType : std::uint8_t { F32 = 0, C64 = 1, F64 = 2, C128 = 3 };

std::size_t element_size(DType dtype);
bool is_complex(DType dtype);

/// In-memory tensor. Values are held as double whatever the file dtype; only
/// one of real/complex is populated.
struct Tensor {
  DType dtype = DType::F32;
  std::vector<std::uint32_t> dims;
  std::vector<double> real;
  std::vector<Complex> complex;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(const std::vector<std::uint8_t>& bytes);

// Conversions. Channel stacks become (H, W, C) with the channel fastest.
Tensor to_tensor(const RealImage& image, DType dtype = DType::F32);
Tensor to_tensor(const ComplexImage& image, DType dtype = DType::C64);
Tensor to_tensor(const std::vector<RealImage>& channels, DType dtype = DType::F32);
Tensor to_tensor(const std::vector<ComplexImage>& channels, DType dtype = DType::C64);
Tensor to_tensor(const CrossOrientFilter& f, DType dtype = DType::C64);

std::vector<RealImage> real_channels(const Tensor& t);
std::vector<ComplexImage> complex_channels(const Tensor& t);
CrossOrientFilter filter_from_tensor(const Tensor& t);

}  // namespace scatterkit
