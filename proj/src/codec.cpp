#include "fairsign/codec.hpp"

#include <limits>

namespace fairsign {

Bytes int_to_bytes(const BigInt& value) {
  if (value < 0) throw Error(Errc::malformed_message, "negative integer cannot be encoded");
  if (value == 0) return {};
  std::size_t count = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  Bytes out(count);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(written);
  return out;
}

BigInt int_from_bytes(ByteView octets) {
  BigInt value;
  if (!octets.empty()) mpz_import(value.get_mpz_t(), octets.size(), 1, 1, 1, 0, octets.data());
  return value;
}

std::size_t bit_length(const BigInt& value) {
  if (value == 0) return 0;
  return mpz_sizeinbase(value.get_mpz_t(), 2);
}

std::string to_hex(ByteView octets) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(octets.size() * 2);
  for (auto b : octets) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw Error(Errc::malformed_message, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::malformed_message, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

void put_u32(Bytes& out, std::uint32_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 24));
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

std::uint32_t get_u32(ByteView in) {
  return static_cast<std::uint32_t>(in[0]) << 24 | static_cast<std::uint32_t>(in[1]) << 16 |
         static_cast<std::uint32_t>(in[2]) << 8 | static_cast<std::uint32_t>(in[3]);
}

FieldWriter& FieldWriter::field(ByteView octets) {
  if (octets.size() > std::numeric_limits<std::uint32_t>::max())
    throw Error(Errc::malformed_message, "field too long");
  put_u32(out_, static_cast<std::uint32_t>(octets.size()));
  out_.insert(out_.end(), octets.begin(), octets.end());
  return *this;
}

FieldWriter& FieldWriter::field(std::string_view text) {
  return field(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

FieldWriter& FieldWriter::integer(const BigInt& value) { return field(int_to_bytes(value)); }

FieldWriter& FieldWriter::octet(std::uint8_t value) { return field(ByteView(&value, 1)); }

ByteView FieldReader::field() {
  if (in_.size() - pos_ < 4) fail("truncated length prefix");
  std::uint32_t len = get_u32(in_.subspan(pos_, 4));
  pos_ += 4;
  if (in_.size() - pos_ < len) fail("field overruns input");
  auto out = in_.subspan(pos_, len);
  pos_ += len;
  return out;
}

Bytes FieldReader::field_bytes() {
  auto view = field();
  return Bytes(view.begin(), view.end());
}

BigInt FieldReader::integer() {
  auto view = field();
  if (!view.empty() && view.front() == 0) fail("non-canonical integer (leading zero)");
  return int_from_bytes(view);
}

std::uint8_t FieldReader::octet() {
  auto view = field();
  if (view.size() != 1) fail("expected a single octet");
  return view.front();
}

void FieldReader::expect_end() const {
  if (!at_end()) fail("trailing octets");
}

void FieldReader::fail(const std::string& what) const { throw Error(failure_, what); }

}  // namespace fairsign
