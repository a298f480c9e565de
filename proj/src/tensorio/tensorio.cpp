#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <unistd.h>

#include "scatterkit/errors.hpp"
#include "scatterkit/tensorio.hpp"

namespace scatterkit {
namespace {

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

constexpr char kMagic[4] = {'S', 'K', 'T', '1'};
constexpr std::size_t kMaxRank = 4;

std::string u128_string(unsigned __int128 v) {
  std::string out;
  do {
    out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  } while (v != 0);
  return out;
}

std::string at_offset(std::size_t offset, const std::string& what) {
  return "offset " + std::to_string(offset) + ": " + what;
}

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

template <typename T>
void append(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

void check_dims(const std::vector<std::uint32_t>& dims) {
  if (dims.empty() || dims.size() > kMaxRank)
    throw ValidationError("tensor rank must be 1..4, got " + std::to_string(dims.size()));
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (dims[i] == 0) throw ValidationError("tensor dimension " + std::to_string(i) + " is zero");
}

std::uint32_t checked_dim(std::size_t n) {
  if (n == 0 || n > UINT32_MAX) throw ValidationError("dimension " + std::to_string(n) + " not representable");
  return static_cast<std::uint32_t>(n);
}

}  // namespace

std::size_t element_size(DType dtype) {
  switch (dtype) {
    case DType::F32: return 4;
    case DType::C64: return 8;
    case DType::F64: return 8;
    case DType::C128: return 16;
  }
  throw ValidationError("unknown dtype");
}

bool is_complex(DType dtype) { return dtype == DType::C64 || dtype == DType::C128; }

std::size_t Tensor::element_count() const {
  std::size_t n = dims.empty() ? 0 : 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  check_dims(t.dims);
  const std::size_t n = t.element_count();
  const std::size_t held = is_complex(t.dtype) ? t.complex.size() : t.real.size();
  if (held != n)
    throw ValidationError("tensor holds " + std::to_string(held) + " values but dims give " +
                          std::to_string(n));

  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(static_cast<std::uint8_t>(t.dtype));
  out.push_back(static_cast<std::uint8_t>(t.dims.size()));
  for (auto d : t.dims) append(out, d);
  out.reserve(out.size() + n * element_size(t.dtype));
  switch (t.dtype) {
    case DType::F32:
      for (double v : t.real) append(out, static_cast<float>(v));
      break;
    case DType::F64:
      for (double v : t.real) append(out, v);
      break;
    case DType::C64:
      for (auto v : t.complex) {
        append(out, static_cast<float>(v.real()));
        append(out, static_cast<float>(v.imag()));
      }
      break;
    case DType::C128:
      for (auto v : t.complex) {
        append(out, v.real());
        append(out, v.imag());
      }
      break;
  }
  return out;
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 6) throw FormatError(at_offset(bytes.size(), "file shorter than the 6-byte header"));
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(at_offset(0, "bad magic, expected SKT1"));
  Tensor t;
  const std::uint8_t dtype = bytes[4];
  if (dtype > 3) throw FormatError(at_offset(4, "unknown dtype code " + std::to_string(dtype)));
  t.dtype = static_cast<DType>(dtype);
  const std::size_t ndim = bytes[5];
  if (ndim == 0 || ndim > kMaxRank) throw FormatError(at_offset(5, "rank " + std::to_string(ndim) + " outside 1..4"));
  const std::size_t header = 6 + 4 * ndim;
  if (bytes.size() < header) throw FormatError(at_offset(bytes.size(), "truncated dimension list"));

  // 4 dims of 32 bits cannot overflow 128 bits.
  unsigned __int128 n = 1;
  unsigned __int128 swapped = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::uint32_t d = load_u32(bytes.data() + 6 + 4 * i);
    if (d == 0) throw FormatError(at_offset(6 + 4 * i, "zero dimension"));
    t.dims.push_back(d);
    n *= d;
    swapped *= __builtin_bswap32(d);
  }
  const std::size_t payload = bytes.size() - header;
  const unsigned __int128 expected = n * element_size(t.dtype);
  if (payload != expected) {
    if (swapped * element_size(t.dtype) == payload)
      throw FormatError(at_offset(6, "dimensions are big-endian; tensor files are little-endian"));
    if (payload < expected)
      throw FormatError(at_offset(bytes.size(), "short payload, expected " +
                                                    u128_string(expected) +
                                                    " bytes after the header"));
    throw FormatError(at_offset(header + static_cast<std::size_t>(expected), "trailing bytes after the payload"));
  }

  const auto count = static_cast<std::size_t>(n);
  const std::uint8_t* p = bytes.data() + header;
  switch (t.dtype) {
    case DType::F32:
      t.real.resize(count);
      for (std::size_t i = 0; i < count; ++i) t.real[i] = load<float>(p + 4 * i);
      break;
    case DType::F64:
      t.real.resize(count);
      for (std::size_t i = 0; i < count; ++i) t.real[i] = load<double>(p + 8 * i);
      break;
    case DType::C64:
      t.complex.resize(count);
      for (std::size_t i = 0; i < count; ++i) t.complex[i] = {load<float>(p + 8 * i), load<float>(p + 8 * i + 4)};
      break;
    case DType::C128:
      t.complex.resize(count);
      for (std::size_t i = 0; i < count; ++i) t.complex[i] = {load<double>(p + 16 * i), load<double>(p + 16 * i + 8)};
      break;
  }
  return t;
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(t);
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw IoError(path.string() + ": cannot open for writing: " + std::strerror(errno));
  const bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size() && std::fflush(f) == 0 &&
                  ::fsync(fileno(f)) == 0;
  const int saved = errno;
  std::fclose(f);
  if (!ok) {
    std::filesystem::remove(tmp);
    throw IoError(path.string() + ": write failed: " + std::strerror(saved));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError(path.string() + ": rename failed: " + ec.message());
  }
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_tensor(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Tensor to_tensor(const RealImage& image, DType dtype) {
  if (is_complex(dtype)) throw ValidationError("real image needs a real dtype");
  Tensor t{dtype, {checked_dim(image.rows()), checked_dim(image.cols())}, {}, {}};
  t.real.assign(image.values().begin(), image.values().end());
  return t;
}

Tensor to_tensor(const ComplexImage& image, DType dtype) {
  if (!is_complex(dtype)) throw ValidationError("complex image needs a complex dtype");
  Tensor t{dtype, {checked_dim(image.rows()), checked_dim(image.cols())}, {}, {}};
  t.complex.assign(image.values().begin(), image.values().end());
  return t;
}

namespace {

template <typename T>
void stack(const std::vector<Array2D<T>>& channels, std::vector<std::uint32_t>& dims, std::vector<T>& out) {
  if (channels.empty()) throw ValidationError("cannot serialise an empty channel stack");
  const auto& first = channels.front();
  for (const auto& c : channels)
    if (!c.same_shape(first)) throw DimensionError("channel shapes differ");
  dims = {checked_dim(first.rows()), checked_dim(first.cols()), checked_dim(channels.size())};
  out.resize(first.size() * channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k)
    for (std::size_t i = 0; i < first.size(); ++i) out[i * channels.size() + k] = channels[k].values()[i];
}

template <typename T>
std::vector<Array2D<T>> unstack(const std::vector<std::uint32_t>& dims, const std::vector<T>& values) {
  if (dims.size() != 2 && dims.size() != 3)
    throw DimensionError("expected a rank-2 or rank-3 tensor, got rank " + std::to_string(dims.size()));
  const std::size_t channels = dims.size() == 3 ? dims[2] : 1;
  std::vector<Array2D<T>> out(channels, Array2D<T>(dims[0], dims[1]));
  const std::size_t plane = static_cast<std::size_t>(dims[0]) * dims[1];
  for (std::size_t i = 0; i < plane; ++i)
    for (std::size_t k = 0; k < channels; ++k) out[k].values()[i] = values[i * channels + k];
  return out;
}

}  // namespace

Tensor to_tensor(const std::vector<RealImage>& channels, DType dtype) {
  if (is_complex(dtype)) throw ValidationError("real channels need a real dtype");
  Tensor t;
  t.dtype = dtype;
  stack(channels, t.dims, t.real);
  return t;
}

Tensor to_tensor(const std::vector<ComplexImage>& channels, DType dtype) {
  if (!is_complex(dtype)) throw ValidationError("complex channels need a complex dtype");
  Tensor t;
  t.dtype = dtype;
  stack(channels, t.dims, t.complex);
  return t;
}

Tensor to_tensor(const CrossOrientFilter& f, DType dtype) {
  if (!is_complex(dtype)) throw ValidationError("filters need a complex dtype");
  Tensor t{dtype, {checked_dim(f.height()), checked_dim(f.width()), checked_dim(kExtendedOrientations)}, {}, {}};
  t.complex.assign(f.values().begin(), f.values().end());
  return t;
}

std::vector<RealImage> real_channels(const Tensor& t) {
  if (is_complex(t.dtype)) throw ValidationError("expected a real tensor");
  return unstack(t.dims, t.real);
}

std::vector<ComplexImage> complex_channels(const Tensor& t) {
  if (!is_complex(t.dtype)) throw ValidationError("expected a complex tensor");
  return unstack(t.dims, t.complex);
}

CrossOrientFilter filter_from_tensor(const Tensor& t) {
  if (!is_complex(t.dtype)) throw ValidationError("filter tensors must be complex");
  if (t.dims.size() != 3 || t.dims[2] != static_cast<std::uint32_t>(kExtendedOrientations))
    throw ValidationError("filter tensors must have shape (h, w, 12)");
  CrossOrientFilter f(t.dims[0], t.dims[1]);
  std::copy(t.complex.begin(), t.complex.end(), f.values().begin());
  return f;
}

}  // namespace scatterkit
