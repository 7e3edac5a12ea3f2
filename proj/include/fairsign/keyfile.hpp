#pragma once

// Key files: one ASCII header line, then length-prefixed integers.
//
//   fairsign-key v1 private\n   e, n, d, p, q
//   fairsign-key v1 public\n    e, n

#include <filesystem>

#include "fairsign/crypto.hpp"

namespace fairsign {

Bytes encode_private_key_file(const RsaKeyPair& keys);
Bytes encode_public_key_file(const RsaPublicKey& pk);
RsaKeyPair decode_private_key_file(ByteView octets);
// Accepts either kind; a private file yields its public half.
RsaPublicKey decode_public_key_file(ByteView octets);

void write_file(const std::filesystem::path& path, ByteView octets);
Bytes read_file(const std::filesystem::path& path);

RsaKeyPair load_private_key(const std::filesystem::path& path);
RsaPublicKey load_public_key(const std::filesystem::path& path);

}  // namespace fairsign
