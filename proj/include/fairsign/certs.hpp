#pragma once

// The two certificates of the protocol, in a canonical length-prefixed form
// (not X.509). The signed region is the body encoding; the serialized
// certificate is the body followed by the issuer signature fields.

#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <utility>

#include "fairsign/crypto.hpp"

namespace fairsign {

class Contract {
 public:
  explicit Contract(Bytes body);
  static Contract from_text(std::string_view text) { return Contract(to_bytes(text)); }

  const Bytes& body() const { return body_; }
  Digest digest() const { return hash(body_); }
  friend bool operator==(const Contract&, const Contract&) = default;

 private:
  Bytes body_;
};

// Fields in order, each with its 4-octet length prefix.
Bytes canonical_encode(std::initializer_list<ByteView> fields);

struct SharedKeyCert {
  static constexpr std::string_view kLabel = "fairsign/shared-key-cert/v1";

  RsaPublicKey shared_pk;
  PartyId subject_initiator = PartyId::A;
  PartyId subject_ttp = PartyId::TTP;
  BigInt serial;
  Signature issuer_sig;

  Bytes encode_body() const;
  Bytes serialize() const;
  static SharedKeyCert parse(ByteView octets);
  std::string render() const;

  friend bool operator==(const SharedKeyCert&, const SharedKeyCert&) = default;
};

struct ContractCert {
  static constexpr std::string_view kLabel = "fairsign/contract-cert/v1";

  Digest he_sig;
  Digest h_c;
  BigInt serial;
  Signature issuer_sig;

  Bytes encode_body() const;
  Bytes serialize() const;
  static ContractCert parse(ByteView octets);
  std::string render() const;

  friend bool operator==(const ContractCert&, const ContractCert&) = default;
};

// Hash of the ciphertext's canonical integer encoding; this is what the CA
// certifies as heSig and what the responder recomputes from E-M1.
Digest encrypted_signature_digest(const EncryptedSignature& enc);

SharedKeyCert issue_shared_key_cert(const RsaKeyPair& ttp_keys, const RsaPublicKey& initiator_pk,
                                    const RsaPublicKey& shared_pk, const BigInt& serial,
                                    const CountSlot& slot = {});

bool verify_shared_key_cert(const SharedKeyCert& cert, const RsaPublicKey& ttp_pk,
                            const CountSlot& slot = {});
bool verify_shared_key_cert(ByteView serialized, const RsaPublicKey& ttp_pk,
                            const CountSlot& slot = {});

bool verify_contract_cert(const ContractCert& cert, const RsaPublicKey& ca_pk,
                          const CountSlot& slot = {});
bool verify_contract_cert(ByteView serialized, const RsaPublicKey& ca_pk,
                          const CountSlot& slot = {});

struct ContractCertRequest {
  Signature initiator_sig;
  Contract contract;
  SharedKeyCert shared_key_cert;
};

struct ContractCertGrant {
  ContractCert cert;
  EncryptedSignature enc_sig;
};

// The certification authority. It owns its keypair and a serial counter;
// each issued contract certificate gets a fresh serial.
class CertificateAuthority {
 public:
  CertificateAuthority(RsaKeyPair keys, RsaPublicKey ttp_pk, ExpCounter* counter = nullptr)
      : keys_(std::move(keys)), ttp_pk_(std::move(ttp_pk)), counter_(counter) {}

  const RsaPublicKey& public_key() const { return keys_.pub; }

  // Checks the initiator's signature on the contract and the shared-key
  // certificate, then certifies the encryption of that signature.
  ContractCertGrant issue_contract_cert(const ContractCertRequest& request,
                                        const RsaPublicKey& initiator_pk);

  const std::set<BigInt>& issued_serials() const { return issued_; }

 private:
  CountSlot slot() const { return {counter_, PartyId::CA, Phase::registration}; }

  RsaKeyPair keys_;
  RsaPublicKey ttp_pk_;
  ExpCounter* counter_;
  BigInt next_serial_ = 1;
  std::set<BigInt> issued_;
};

}  // namespace fairsign
