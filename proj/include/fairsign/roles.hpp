#pragma once

// Honest state machines for the initiator (P_a), the responder (P_b) and the
// offline TTP (P_t). Each method enforces its phase precondition and throws
// Errc::protocol_order otherwise. Deviating behaviour lives in the
// simulation's strategy wrappers, never here.

#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>

#include "fairsign/messages.hpp"

namespace fairsign {

enum class PartyPhase {
  Init,
  Registered,
  Em1Sent,
  Em1Verified,
  Em2Sent,
  Em2Verified,
  Em3Sent,
  Done,
  DisputePending,
  Resolved,
  Aborted,
};

std::string_view party_phase_name(PartyPhase phase);

// Public keys of every role, as certified before the protocol starts.
class Keyring {
 public:
  void add(PartyId id, RsaPublicKey pk) { keys_[id] = std::move(pk); }
  const RsaPublicKey& at(PartyId id) const;
  bool contains(PartyId id) const { return keys_.count(id) != 0; }

 private:
  std::map<PartyId, RsaPublicKey> keys_;
};

struct Verdict {
  bool accepted = false;
  std::optional<RejectReason> reason;

  static Verdict accept() { return {true, std::nullopt}; }
  static Verdict reject(RejectReason r) { return {false, r}; }
};

// A signature value that cannot be below the verifier's modulus is simply not
// a valid signature from that party; protocol code treats it as a rejection.
bool signature_matches(const Digest& expected, const Signature& sig, const RsaPublicKey& pk,
                       const CountSlot& slot);

class TrustedParty;

struct Registration {
  SharedKeyCert c_at;
  ContractCert c_cert;
  // The CA's copy of the ciphertext; the initiator computes its own at E-M1.
  EncryptedSignature ca_enc_sig;
};

class Initiator {
 public:
  Initiator(RsaKeyPair keys, Keyring keyring, ExpCounter* counter = nullptr)
      : keys_(std::move(keys)), keyring_(std::move(keyring)), counter_(counter) {}

  // Registration, split into its message steps so it can run over a network.
  MsgShareKeyRequest begin_registration(Contract contract);
  MsgCertRequest accept_shared_key_cert(const SharedKeyCert& c_at);
  void accept_contract_cert(const ContractCert& c_cert);

  // All three steps against in-process TTP and CA instances.
  Registration register_with(Contract contract, TrustedParty& ttp, CertificateAuthority& ca);

  // enc.pk_at(Sig_a(C)), booked to the exchange phase.
  EncryptedSignature encrypt_own_signature();

  MsgEM1 build_em1();
  bool verify_em2(const MsgEM2& msg);
  MsgEM3 build_em3();
  // verify_em2 followed by build_em3 on success.
  std::optional<MsgEM3> on_em2(const MsgEM2& msg);
  void apply_drm2(const MsgDRM2& msg);

  PartyPhase phase() const { return phase_; }
  const std::optional<Signature>& counterpart_sig() const { return counterpart_sig_; }
  const std::optional<Signature>& own_sig() const { return own_sig_; }
  const std::optional<Contract>& contract() const { return contract_; }
  const std::optional<SharedKeyCert>& shared_key_cert() const { return c_at_; }
  const std::optional<ContractCert>& contract_cert() const { return c_cert_; }
  const RsaKeyPair& keys() const { return keys_; }

 private:
  void require(PartyPhase expected, std::string_view op) const;
  CountSlot slot(Phase phase) const { return {counter_, PartyId::A, phase}; }

  RsaKeyPair keys_;
  Keyring keyring_;
  ExpCounter* counter_;
  PartyPhase phase_ = PartyPhase::Init;
  std::optional<Contract> contract_;
  std::optional<SharedKeyCert> c_at_;
  std::optional<ContractCert> c_cert_;
  std::optional<Signature> own_sig_;
  std::optional<Signature> counterpart_sig_;
};

class Responder {
 public:
  Responder(RsaKeyPair keys, Keyring keyring, Contract agreed, ExpCounter* counter = nullptr)
      : keys_(std::move(keys)),
        keyring_(std::move(keyring)),
        agreed_(std::move(agreed)),
        counter_(counter) {}

  // Certificate signatures, contract hash against hC, ciphertext hash
  // against heSig. Rejection aborts without releasing anything.
  Verdict verify_em1(const MsgEM1& msg);
  MsgEM2 build_em2();
  Verdict verify_em3(const MsgEM3& msg);
  // No E-M3 within the deadline.
  void on_timeout();
  MsgDRM1 build_drm1() const;
  void apply_drm3(const MsgDRM3& msg);
  void apply_rejection(const MsgDisputeRejected& msg);

  PartyPhase phase() const { return phase_; }
  const std::optional<MsgEM1>& held_em1() const { return em1_; }
  const std::optional<Signature>& counterpart_sig() const { return counterpart_sig_; }
  const std::optional<Signature>& own_sig() const { return own_sig_; }
  const Contract& agreed_contract() const { return agreed_; }
  const RsaKeyPair& keys() const { return keys_; }
  std::optional<RejectReason> last_rejection() const { return last_rejection_; }

 private:
  void require(PartyPhase expected, std::string_view op) const;
  CountSlot slot(Phase phase) const { return {counter_, PartyId::B, phase}; }

  RsaKeyPair keys_;
  Keyring keyring_;
  Contract agreed_;
  ExpCounter* counter_;
  PartyPhase phase_ = PartyPhase::Init;
  std::optional<MsgEM1> em1_;
  std::optional<Signature> own_sig_;
  std::optional<Signature> counterpart_sig_;
  std::optional<RejectReason> last_rejection_;
};

// How the TTP checks the encrypted signature in a dispute:
//  hash_compare   - hash the ciphertext and compare with heSig, decrypt only
//                   to recover Sig_a(C);
//  decrypt_verify - decrypt with sk_at and verify the recovered signature
//                   against hC under pk_a (the decryption is the recovery).
enum class DisputeCheck { hash_compare, decrypt_verify };

struct Resolution {
  MsgDRM2 to_initiator;
  MsgDRM3 to_responder;
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

using DisputeOutcome = std::variant<Resolution, MsgDisputeRejected>;

class TrustedParty {
 public:
  struct Options {
    DisputeCheck check = DisputeCheck::decrypt_verify;
    // Shared modulus is this many bits longer than the initiator's.
    std::size_t shared_extra_bits = 16;
    std::optional<std::uint64_t> shared_key_seed;
  };

  TrustedParty(RsaKeyPair keys, Keyring keyring, ExpCounter* counter = nullptr)
      : TrustedParty(std::move(keys), std::move(keyring), counter, Options{}) {}
  TrustedParty(RsaKeyPair keys, Keyring keyring, ExpCounter* counter, Options options)
      : keys_(std::move(keys)),
        keyring_(std::move(keyring)),
        counter_(counter),
        options_(options) {}

  const RsaPublicKey& public_key() const { return keys_.pub; }

  // Generates pk_at/sk_at for the initiator, keeps sk_at, certifies pk_at.
  SharedKeyCert issue_shared_key(const RsaPublicKey& initiator_pk);
  // Same, with caller-supplied shared key material.
  SharedKeyCert issue_shared_key(const RsaPublicKey& initiator_pk, RsaKeyPair shared);

  // Handles DR-M1 cold: no prior contact with the initiator is needed.
  DisputeOutcome resolve(const MsgDRM1& msg);

  using Ledger = std::map<Digest, std::pair<Signature, Signature>>;
  const Ledger& ledger() const { return ledger_; }
  std::size_t disputes_received() const { return disputes_received_; }

 private:
  CountSlot slot(Phase phase) const { return {counter_, PartyId::TTP, phase}; }

  RsaKeyPair keys_;
  Keyring keyring_;
  ExpCounter* counter_;
  Options options_;
  BigInt next_serial_ = 1;
  std::map<BigInt, RsaPrivateKey> shared_keys_;  // keyed by shared modulus
  Ledger ledger_;
  std::size_t disputes_received_ = 0;
};

}  // namespace fairsign
