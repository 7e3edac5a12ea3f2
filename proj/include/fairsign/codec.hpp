#pragma once

// Length-prefixed octet encoding shared by certificates, messages and key
// files. Every field is a 4-octet big-endian length followed by its octets.
// Integers are unsigned big-endian magnitudes with no leading zero octets,
// so zero is the empty field.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "fairsign/errors.hpp"

namespace fairsign {

using BigInt = mpz_class;
using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

Bytes int_to_bytes(const BigInt& value);
BigInt int_from_bytes(ByteView octets);
std::size_t bit_length(const BigInt& value);

std::string to_hex(ByteView octets);
Bytes from_hex(std::string_view hex);
Bytes to_bytes(std::string_view text);

class FieldWriter {
 public:
  FieldWriter& field(ByteView octets);
  FieldWriter& field(std::string_view text);
  FieldWriter& integer(const BigInt& value);
  FieldWriter& octet(std::uint8_t value);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Reads fields back; any truncation or trailing garbage raises `failure`.
class FieldReader {
 public:
  FieldReader(ByteView input, Errc failure) : in_(input), failure_(failure) {}

  ByteView field();
  Bytes field_bytes();
  BigInt integer();
  std::uint8_t octet();
  bool at_end() const { return pos_ == in_.size(); }
  void expect_end() const;

 private:
  [[noreturn]] void fail(const std::string& what) const;

  ByteView in_;
  std::size_t pos_ = 0;
  Errc failure_;
};

void put_u32(Bytes& out, std::uint32_t value);
std::uint32_t get_u32(ByteView in);

}  // namespace fairsign
