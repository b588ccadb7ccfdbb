#include "cmlptr/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "cmlptr/errors.hpp"

namespace cmlptr {

namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'M', 'T', '1'};
constexpr std::size_t kPrefix = 6;

void put_u64(std::uint8_t* out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out[b] = static_cast<std::uint8_t>(v >> (8 * b));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

std::vector<std::uint8_t> encode(std::span<const std::uint64_t> shape, const double* data,
                                 std::size_t count) {
  const std::size_t header = kPrefix + 8 * shape.size();
  std::vector<std::uint8_t> out(header + 8 * count);
  std::copy(std::begin(kMagic), std::end(kMagic), out.data());
  out[4] = kDtypeFloat64;
  out[5] = static_cast<std::uint8_t>(shape.size());
  for (std::size_t d = 0; d < shape.size(); ++d) put_u64(out.data() + kPrefix + 8 * d, shape[d]);
  for (std::size_t i = 0; i < count; ++i) {
    put_u64(out.data() + header + 8 * i, std::bit_cast<std::uint64_t>(data[i]));
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor3& t) {
  const auto s = t.shape();
  const std::uint64_t shape[3] = {static_cast<std::uint64_t>(s[0]), static_cast<std::uint64_t>(s[1]),
                                  static_cast<std::uint64_t>(s[2])};
  return encode(shape, t.data().data(), t.data().size());
}

std::vector<std::uint8_t> encode_tensor(const Matrix& m) {
  const std::uint64_t shape[2] = {static_cast<std::uint64_t>(m.rows()),
                                  static_cast<std::uint64_t>(m.cols())};
  return encode(shape, m.data(), static_cast<std::size_t>(m.size()));
}

TensorData decode_tensor(std::span<const std::uint8_t> bytes) {
  const std::size_t n = bytes.size();
  if (n < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw ParseError(0, "bad magic, expected \"CMT1\"");
  }
  if (n < 5) throw ParseError(4, "truncated header: missing dtype");
  if (bytes[4] != kDtypeFloat64) {
    throw ParseError(4, "unsupported dtype code " + std::to_string(bytes[4]));
  }
  if (n < 6) throw ParseError(5, "truncated header: missing ndim");
  const int ndim = bytes[5];
  if (ndim != 2 && ndim != 3) throw ParseError(5, "ndim must be 2 or 3, got " + std::to_string(ndim));
  const std::size_t header = kPrefix + 8 * static_cast<std::size_t>(ndim);
  if (n < header) throw ParseError(n, "truncated header: shape needs " + std::to_string(header) + " bytes");

  std::array<std::uint64_t, 3> shape{};
  std::uint64_t count = 1;
  for (int d = 0; d < ndim; ++d) {
    const std::size_t at = kPrefix + 8 * static_cast<std::size_t>(d);
    shape[static_cast<std::size_t>(d)] = get_u64(bytes.data() + at);
    const std::uint64_t e = shape[static_cast<std::size_t>(d)];
    if (e == 0 || e > (std::uint64_t{1} << 40) || count > (std::uint64_t{1} << 40) / e) {
      throw ParseError(at, "invalid extent " + std::to_string(e));
    }
    count *= e;
  }
  const std::uint64_t expected = header + 8 * count;
  if (n < expected) {
    throw ParseError(n, "truncated payload: expected " + std::to_string(expected) + " bytes, got " +
                            std::to_string(n));
  }
  if (n > expected) throw ParseError(expected, "trailing bytes after payload");

  std::vector<double> values(count);
  const std::uint8_t* p = bytes.data() + header;
  for (std::uint64_t i = 0; i < count; ++i) values[i] = std::bit_cast<double>(get_u64(p + 8 * i));

  if (ndim == 2) {
    Matrix m(static_cast<Index>(shape[0]), static_cast<Index>(shape[1]));
    std::copy(values.begin(), values.end(), m.data());
    return m;
  }
  return Tensor3({static_cast<Index>(shape[0]), static_cast<Index>(shape[1]),
                  static_cast<Index>(shape[2])},
                 std::move(values));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

std::string read_text(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> b = read_file(path);
  return std::string(b.begin(), b.end());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace " + path.string() + ": " + ec.message());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

TensorData read_tensor(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return decode_tensor(bytes);
  } catch (const ParseError& e) {
    throw ParseError(e.offset(), path.string() + ": " + e.reason());
  }
}

Tensor3 read_tensor3(const std::filesystem::path& path) {
  TensorData d = read_tensor(path);
  if (auto* t = std::get_if<Tensor3>(&d)) return std::move(*t);
  throw DimensionError(path.string() + ": expected a 3-way tensor, found a matrix");
}

Matrix read_matrix(const std::filesystem::path& path) {
  TensorData d = read_tensor(path);
  if (auto* m = std::get_if<Matrix>(&d)) return std::move(*m);
  throw DimensionError(path.string() + ": expected a matrix, found a 3-way tensor");
}

void write_tensor(const std::filesystem::path& path, const Tensor3& t) {
  write_file_atomic(path, encode_tensor(t));
}

void write_tensor(const std::filesystem::path& path, const Matrix& m) {
  write_file_atomic(path, encode_tensor(m));
}

namespace {

std::string lower_trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::map<std::string, std::string> parse_envi_header(const std::string& text,
                                                     const std::filesystem::path& path) {
  if (text.rfind("ENVI", 0) != 0) throw ParseError(0, path.string() + ": missing ENVI signature");
  std::map<std::string, std::string> fields;
  std::size_t pos = text.find('\n');
  while (pos != std::string::npos && pos < text.size()) {
    const std::size_t start = pos + 1;
    std::size_t eq = text.find('=', start);
    std::size_t eol = text.find('\n', start);
    if (eq == std::string::npos) break;
    if (eol != std::string::npos && eq > eol) {
      pos = eol;
      continue;
    }
    std::string key = lower_trim(text.substr(start, eq - start));
    std::size_t vstart = eq + 1;
    while (vstart < text.size() && (text[vstart] == ' ' || text[vstart] == '\t')) ++vstart;
    std::size_t vend;
    if (vstart < text.size() && text[vstart] == '{') {
      vend = text.find('}', vstart);
      if (vend == std::string::npos) throw ParseError(vstart, path.string() + ": unterminated '{'");
      fields[key] = text.substr(vstart + 1, vend - vstart - 1);
      pos = text.find('\n', vend);
    } else {
      vend = eol == std::string::npos ? text.size() : eol;
      fields[key] = lower_trim(text.substr(vstart, vend - vstart));
      pos = eol;
    }
  }
  return fields;
}

template <class T>
double load_le(const std::uint8_t* p, bool big_endian) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if (big_endian != (std::endian::native == std::endian::big)) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return static_cast<double>(v);
}

}  // namespace

Tensor3 read_envi(const std::filesystem::path& header_path) {
  const auto fields = parse_envi_header(read_text(header_path), header_path);
  auto need = [&](const char* key) -> long long {
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(header_path.string() + ": header lacks '" + key + "'");
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      throw ConfigError(header_path.string() + ": bad value for '" + key + "'");
    }
  };
  const long long samples = need("samples");
  const long long lines = need("lines");
  const long long bands = need("bands");
  const long long dtype = need("data type");
  const long long offset = fields.count("header offset") ? need("header offset") : 0;
  const bool big = fields.count("byte order") ? need("byte order") == 1 : false;
  if (fields.count("interleave") && fields.at("interleave") != "bsq") {
    throw ConfigError(header_path.string() + ": only band-sequential (bsq) interleave is supported");
  }
  if (samples <= 0 || lines <= 0 || bands <= 0 || offset < 0) {
    throw ConfigError(header_path.string() + ": non-positive extents");
  }
  std::size_t width;
  switch (dtype) {
    case 1: width = 1; break;
    case 2: width = 2; break;
    case 3: width = 4; break;
    case 4: width = 4; break;
    case 5: width = 8; break;
    case 12: width = 2; break;
    default: throw ConfigError(header_path.string() + ": unsupported data type " + std::to_string(dtype));
  }

  std::filesystem::path data_path = header_path;
  data_path.replace_extension();
  if (!std::filesystem::exists(data_path)) {
    for (const char* ext : {".img", ".raw", ".dat", ".bsq"}) {
      std::filesystem::path cand = data_path;
      cand += ext;
      if (std::filesystem::exists(cand)) {
        data_path = cand;
        break;
      }
    }
  }
  const std::vector<std::uint8_t> raw = read_file(data_path);
  const std::size_t count = static_cast<std::size_t>(samples * lines * bands);
  const std::size_t need_bytes = static_cast<std::size_t>(offset) + count * width;
  if (raw.size() < need_bytes) {
    throw ParseError(raw.size(), data_path.string() + ": expected " + std::to_string(need_bytes) + " bytes");
  }

  Tensor3 t({lines, samples, bands});
  const std::uint8_t* base = raw.data() + offset;
  std::size_t i = 0;
  for (long long b = 0; b < bands; ++b) {
    for (long long l = 0; l < lines; ++l) {
      for (long long s = 0; s < samples; ++s, ++i) {
        const std::uint8_t* p = base + i * width;
        double v = 0.0;
        switch (dtype) {
          case 1: v = *p; break;
          case 2: v = load_le<std::int16_t>(p, big); break;
          case 3: v = load_le<std::int32_t>(p, big); break;
          case 4: v = load_le<float>(p, big); break;
          case 5: v = load_le<double>(p, big); break;
          case 12: v = load_le<std::uint16_t>(p, big); break;
        }
        t(l, s, b) = v;
      }
    }
  }
  return t;
}

}  // namespace cmlptr
