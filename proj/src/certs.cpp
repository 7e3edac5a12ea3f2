#include "fairsign/certs.hpp"

#include <sstream>

namespace fairsign {

namespace {

Bytes digest_field(const Digest& d) { return Bytes(d.bytes.begin(), d.bytes.end()); }

Digest read_digest(FieldReader& in) {
  auto view = in.field();
  if (view.size() != Digest::kSize) throw Error(Errc::malformed_certificate, "digest length");
  Digest d;
  std::copy(view.begin(), view.end(), d.bytes.begin());
  return d;
}

void append_signature(Bytes& out, const Signature& sig) {
  FieldWriter w;
  w.integer(sig.value).integer(sig.signer_modulus_bits);
  const auto& tail = w.bytes();
  out.insert(out.end(), tail.begin(), tail.end());
}

Signature read_signature(FieldReader& in) {
  Signature sig;
  sig.value = in.integer();
  BigInt bits = in.integer();
  if (!bits.fits_uint_p()) throw Error(Errc::malformed_certificate, "signature bit length");
  sig.signer_modulus_bits = static_cast<std::uint32_t>(bits.get_ui());
  return sig;
}

void expect_label(FieldReader& in, std::string_view label) {
  auto view = in.field();
  if (std::string_view(reinterpret_cast<const char*>(view.data()), view.size()) != label)
    throw Error(Errc::malformed_certificate, "unexpected certificate label");
}

PartyId read_party(FieldReader& in) {
  auto raw = in.octet();
  if (raw < 1 || raw > 4) throw Error(Errc::malformed_certificate, "unknown party id");
  return static_cast<PartyId>(raw);
}

bool verify_issuer(const Bytes& body, const Signature& sig, const RsaPublicKey& issuer,
                   const CountSlot& slot) {
  // A signature value at or above the issuer's modulus cannot have come from
  // that issuer; that is a failed verification, not a malformed certificate.
  if (sig.value >= issuer.n) return false;
  // The declared size sits outside the signed body; it must name the issuer's key.
  if (sig.signer_modulus_bits != issuer.bits()) return false;
  return verify_sig(body, sig, issuer, slot);
}

}  // namespace

Contract::Contract(Bytes body) : body_(std::move(body)) {
  if (body_.empty()) throw std::invalid_argument("contract body must be non-empty");
}

Bytes canonical_encode(std::initializer_list<ByteView> fields) {
  FieldWriter w;
  for (auto f : fields) w.field(f);
  return std::move(w).take();
}

Bytes SharedKeyCert::encode_body() const {
  FieldWriter w;
  w.field(kLabel)
      .integer(shared_pk.e)
      .integer(shared_pk.n)
      .octet(static_cast<std::uint8_t>(subject_initiator))
      .octet(static_cast<std::uint8_t>(subject_ttp))
      .integer(serial);
  return std::move(w).take();
}

Bytes SharedKeyCert::serialize() const {
  Bytes out = encode_body();
  append_signature(out, issuer_sig);
  return out;
}

SharedKeyCert SharedKeyCert::parse(ByteView octets) {
  FieldReader in(octets, Errc::malformed_certificate);
  expect_label(in, kLabel);
  SharedKeyCert cert;
  cert.shared_pk.e = in.integer();
  cert.shared_pk.n = in.integer();
  cert.subject_initiator = read_party(in);
  cert.subject_ttp = read_party(in);
  cert.serial = in.integer();
  cert.issuer_sig = read_signature(in);
  in.expect_end();
  return cert;
}

std::string SharedKeyCert::render() const {
  std::ostringstream os;
  os << "label: " << kLabel << '\n'
     << "shared_pk.e: " << shared_pk.e.get_str(16) << '\n'
     << "shared_pk.n: " << shared_pk.n.get_str(16) << '\n'
     << "subject: " << party_name(subject_initiator) << ',' << party_name(subject_ttp) << '\n'
     << "serial: " << serial.get_str(16) << '\n'
     << "issuer_sig: " << issuer_sig.value.get_str(16) << '\n';
  return os.str();
}

Bytes ContractCert::encode_body() const {
  FieldWriter w;
  w.field(kLabel).field(digest_field(he_sig)).field(digest_field(h_c)).integer(serial);
  return std::move(w).take();
}

Bytes ContractCert::serialize() const {
  Bytes out = encode_body();
  append_signature(out, issuer_sig);
  return out;
}

ContractCert ContractCert::parse(ByteView octets) {
  FieldReader in(octets, Errc::malformed_certificate);
  expect_label(in, kLabel);
  ContractCert cert;
  cert.he_sig = read_digest(in);
  cert.h_c = read_digest(in);
  cert.serial = in.integer();
  cert.issuer_sig = read_signature(in);
  in.expect_end();
  return cert;
}

std::string ContractCert::render() const {
  std::ostringstream os;
  os << "label: " << kLabel << '\n'
     << "he_sig: " << he_sig.hex() << '\n'
     << "h_c: " << h_c.hex() << '\n'
     << "serial: " << serial.get_str(16) << '\n'
     << "issuer_sig: " << issuer_sig.value.get_str(16) << '\n';
  return os.str();
}

Digest encrypted_signature_digest(const EncryptedSignature& enc) {
  FieldWriter w;
  w.integer(enc.value);
  return hash(w.bytes());
}

SharedKeyCert issue_shared_key_cert(const RsaKeyPair& ttp_keys, const RsaPublicKey& initiator_pk,
                                    const RsaPublicKey& shared_pk, const BigInt& serial,
                                    const CountSlot& slot) {
  // Any initiator signature must be a valid plaintext under the shared key.
  if (shared_pk.bits() < initiator_pk.bits() + 8)
    throw Error(Errc::shared_modulus_too_small,
                "shared modulus has " + std::to_string(shared_pk.bits()) +
                    " bits, initiator modulus " + std::to_string(initiator_pk.bits()));
  SharedKeyCert cert;
  cert.shared_pk = shared_pk;
  cert.serial = serial;
  cert.issuer_sig = sign(cert.encode_body(), ttp_keys.priv, slot);
  return cert;
}

bool verify_shared_key_cert(const SharedKeyCert& cert, const RsaPublicKey& ttp_pk,
                            const CountSlot& slot) {
  return verify_issuer(cert.encode_body(), cert.issuer_sig, ttp_pk, slot);
}

bool verify_shared_key_cert(ByteView serialized, const RsaPublicKey& ttp_pk,
                            const CountSlot& slot) {
  return verify_shared_key_cert(SharedKeyCert::parse(serialized), ttp_pk, slot);
}

bool verify_contract_cert(const ContractCert& cert, const RsaPublicKey& ca_pk,
                          const CountSlot& slot) {
  return verify_issuer(cert.encode_body(), cert.issuer_sig, ca_pk, slot);
}

bool verify_contract_cert(ByteView serialized, const RsaPublicKey& ca_pk, const CountSlot& slot) {
  return verify_contract_cert(ContractCert::parse(serialized), ca_pk, slot);
}

ContractCertGrant CertificateAuthority::issue_contract_cert(const ContractCertRequest& request,
                                                            const RsaPublicKey& initiator_pk) {
  const auto& sig = request.initiator_sig;
  if (sig.value >= initiator_pk.n ||
      !verify_sig(request.contract.body(), sig, initiator_pk, slot()))
    throw Error(Errc::signature_rejected, "initiator signature does not match the contract");
  if (!verify_shared_key_cert(request.shared_key_cert, ttp_pk_, slot()))
    throw Error(Errc::certificate_rejected, "shared-key certificate does not verify");

  EncryptedSignature enc{rsa_encrypt(sig.value, request.shared_key_cert.shared_pk, slot())};

  ContractCert cert;
  cert.he_sig = encrypted_signature_digest(enc);
  cert.h_c = request.contract.digest();
  cert.serial = next_serial_;
  next_serial_ += 1;
  cert.issuer_sig = sign(cert.encode_body(), keys_.priv, slot());
  issued_.insert(cert.serial);
  return {std::move(cert), std::move(enc)};
}

}  // namespace fairsign
