#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "despeckle/image.hpp"

namespace despeckle {
namespace {

constexpr std::size_t kRawHeaderBytes = 16;
constexpr std::uint32_t kRawVersion = 1;

bool is_pgm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

/// Cursor over the PGM header: whitespace and '#' comments between tokens.
class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_pgm_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw ParseError(field, "unexpected end of file");
    if (bytes_[pos_] < '0' || bytes_[pos_] > '9') throw ParseError(field, "expected a decimal integer");
    long value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw ParseError(field, "value out of range");
      ++pos_;
    }
    if (pos_ < bytes_.size() && !is_pgm_space(bytes_[pos_]) && bytes_[pos_] != '#') {
      throw ParseError(field, "garbage after integer");
    }
    return value;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u32_le(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32_le(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

Image read_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("magic", "expected P2 or P5");
  }
  const bool binary = bytes[1] == '5';
  PgmHeaderReader reader(bytes);
  reader.advance(2);
  if (reader.pos() < bytes.size() && !is_pgm_space(bytes[reader.pos()]) && bytes[reader.pos()] != '#') {
    throw ParseError("magic", "expected P2 or P5");
  }
  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  const long maxval = reader.read_uint("maxval");
  if (width <= 0) throw ParseError("width", "must be positive");
  if (height <= 0) throw ParseError("height", "must be positive");
  if (maxval != 255 && maxval != 65535) throw ParseError("maxval", "must be 255 or 65535");

  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> pixels(count);

  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t pos = reader.pos();
    if (pos >= bytes.size() || !is_pgm_space(bytes[pos])) throw ParseError("payload", "missing raster");
    ++pos;
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    if (bytes.size() - pos < count * sample_bytes) throw ParseError("payload", "truncated raster");
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t v = bytes[pos + i * sample_bytes];
      if (sample_bytes == 2) v = (v << 8) | bytes[pos + i * sample_bytes + 1];
      if (v > static_cast<std::uint32_t>(maxval)) throw ParseError("payload", "sample exceeds maxval");
      pixels[i] = static_cast<double>(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      long v = 0;
      try {
        v = reader.read_uint("payload");
      } catch (const ParseError&) {
        throw ParseError("payload", "truncated or malformed raster");
      }
      if (v > maxval) throw ParseError("payload", "sample exceeds maxval");
      pixels[i] = static_cast<double>(v);
    }
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

PgmEncoding write_pgm(const Image& img, int maxval, bool binary) {
  if (maxval != 255 && maxval != 65535) throw InvalidArgument("PGM maxval must be 255 or 65535");
  PgmEncoding enc;
  const std::string header = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(img.width()) +
                             " " + std::to_string(img.height()) + "\n" + std::to_string(maxval) + "\n";
  enc.bytes.assign(header.begin(), header.end());

  std::vector<std::uint32_t> samples(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    double v = img[i];
    if (!(v >= 0.0)) {  // also catches NaN
      v = 0.0;
      ++enc.clamped;
    } else if (v > maxval) {
      v = maxval;
      ++enc.clamped;
    }
    // Default FP rounding mode rounds half to even.
    samples[i] = static_cast<std::uint32_t>(std::nearbyint(v));
  }

  if (binary) {
    for (std::uint32_t s : samples) {
      if (maxval > 255) enc.bytes.push_back(static_cast<std::uint8_t>(s >> 8));
      enc.bytes.push_back(static_cast<std::uint8_t>(s & 0xFFu));
    }
  } else {
    std::string text;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (x > 0) text += ' ';
        text += std::to_string(samples[static_cast<std::size_t>(y) * img.width() + x]);
      }
      text += '\n';
    }
    enc.bytes.insert(enc.bytes.end(), text.begin(), text.end());
  }
  return enc;
}

Image read_rawf32(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kRawHeaderBytes) throw ParseError("header", "shorter than 16 bytes");
  if (std::memcmp(bytes.data(), "DSPK", 4) != 0) throw ParseError("magic", "expected DSPK");
  if (get_u32_le(bytes, 4) != kRawVersion) throw ParseError("version", "unsupported version");
  const std::uint32_t width = get_u32_le(bytes, 8);
  const std::uint32_t height = get_u32_le(bytes, 12);
  if (width == 0 || width > 0x7FFFFFFFu) throw ParseError("width", "must be positive");
  if (height == 0 || height > 0x7FFFFFFFu) throw ParseError("height", "must be positive");
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - kRawHeaderBytes != count * 4) {
    throw ParseError("payload", "size does not match width*height");
  }
  std::vector<double> pixels(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(get_u32_le(bytes, kRawHeaderBytes + 4 * i));
    if (!std::isfinite(f)) throw ParseError("payload", "non-finite sample");
    pixels[i] = static_cast<double>(f);
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

Bytes write_rawf32(const Image& img) {
  Bytes out;
  out.reserve(kRawHeaderBytes + img.size() * 4);
  out.insert(out.end(), {'D', 'S', 'P', 'K'});
  put_u32_le(out, kRawVersion);
  put_u32_le(out, static_cast<std::uint32_t>(img.width()));
  put_u32_le(out, static_cast<std::uint32_t>(img.height()));
  for (double v : img.pixels()) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path);
}

Image load_image(const std::string& path) {
  const Bytes bytes = read_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "DSPK", 4) == 0) return read_rawf32(bytes);
  return read_pgm(bytes);
}

std::size_t save_image(const std::string& path, const Image& img, int pgm_maxval) {
  if (ends_with(path, ".pgm")) {
    const PgmEncoding enc = write_pgm(img, pgm_maxval, true);
    write_file(path, enc.bytes);
    return enc.clamped;
  }
  write_file(path, write_rawf32(img));
  return 0;
}

}  // namespace despeckle
