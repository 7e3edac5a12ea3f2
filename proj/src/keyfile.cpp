#include "fairsign/keyfile.hpp"

#include <fstream>
#include <iterator>
#include <string_view>

namespace fairsign {

namespace {

constexpr std::string_view kPrivateHeader = "fairsign-key v1 private\n";
constexpr std::string_view kPublicHeader = "fairsign-key v1 public\n";

bool starts_with(ByteView octets, std::string_view header) {
  return octets.size() >= header.size() &&
         std::equal(header.begin(), header.end(), octets.begin());
}

Bytes with_header(std::string_view header, const Bytes& body) {
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

}  // namespace

Bytes encode_private_key_file(const RsaKeyPair& keys) {
  FieldWriter w;
  w.integer(keys.pub.e).integer(keys.pub.n).integer(keys.priv.d).integer(keys.priv.p).integer(
      keys.priv.q);
  return with_header(kPrivateHeader, w.bytes());
}

Bytes encode_public_key_file(const RsaPublicKey& pk) {
  FieldWriter w;
  w.integer(pk.e).integer(pk.n);
  return with_header(kPublicHeader, w.bytes());
}

RsaKeyPair decode_private_key_file(ByteView octets) {
  if (!starts_with(octets, kPrivateHeader))
    throw Error(Errc::malformed_key_file, "missing private key header");
  FieldReader in(octets.subspan(kPrivateHeader.size()), Errc::malformed_key_file);
  RsaKeyPair keys;
  keys.pub.e = in.integer();
  keys.pub.n = in.integer();
  keys.priv.d = in.integer();
  keys.priv.p = in.integer();
  keys.priv.q = in.integer();
  keys.priv.n = keys.pub.n;
  in.expect_end();
  if (keys.pub.n <= 1 || keys.pub.e <= 1 || keys.priv.d <= 1)
    throw Error(Errc::malformed_key_file, "degenerate key");
  return keys;
}

RsaPublicKey decode_public_key_file(ByteView octets) {
  if (starts_with(octets, kPrivateHeader)) return decode_private_key_file(octets).pub;
  if (!starts_with(octets, kPublicHeader))
    throw Error(Errc::malformed_key_file, "missing public key header");
  FieldReader in(octets.subspan(kPublicHeader.size()), Errc::malformed_key_file);
  RsaPublicKey pk;
  pk.e = in.integer();
  pk.n = in.integer();
  in.expect_end();
  if (pk.n <= 1 || pk.e <= 1) throw Error(Errc::malformed_key_file, "degenerate key");
  return pk;
}

void write_file(const std::filesystem::path& path, ByteView octets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::usage, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(octets.data()), static_cast<std::streamsize>(octets.size()));
  if (!out) throw Error(Errc::usage, "failed writing " + path.string());
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::usage, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RsaKeyPair load_private_key(const std::filesystem::path& path) {
  return decode_private_key_file(read_file(path));
}

RsaPublicKey load_public_key(const std::filesystem::path& path) {
  return decode_public_key_file(read_file(path));
}

}  // namespace fairsign
