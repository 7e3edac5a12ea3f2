#include "fairsign/roles.hpp"

#include <string>

namespace fairsign {

std::string_view party_phase_name(PartyPhase phase) {
  switch (phase) {
    case PartyPhase::Init: return "Init";
    case PartyPhase::Registered: return "Registered";
    case PartyPhase::Em1Sent: return "Em1Sent";
    case PartyPhase::Em1Verified: return "Em1Verified";
    case PartyPhase::Em2Sent: return "Em2Sent";
    case PartyPhase::Em2Verified: return "Em2Verified";
    case PartyPhase::Em3Sent: return "Em3Sent";
    case PartyPhase::Done: return "Done";
    case PartyPhase::DisputePending: return "DisputePending";
    case PartyPhase::Resolved: return "Resolved";
    case PartyPhase::Aborted: return "Aborted";
  }
  return "?";
}

const RsaPublicKey& Keyring::at(PartyId id) const {
  auto it = keys_.find(id);
  if (it == keys_.end())
    throw Error(Errc::usage, "no public key for " + std::string(party_name(id)));
  return it->second;
}

bool signature_matches(const Digest& expected, const Signature& sig, const RsaPublicKey& pk,
                       const CountSlot& slot) {
  if (sig.value < 0 || sig.value >= pk.n) return false;
  return verify_digest(expected, sig, pk, slot);
}

namespace {

[[noreturn]] void order_error(std::string_view who, std::string_view op, PartyPhase phase) {
  throw Error(Errc::protocol_order, std::string(who) + "::" + std::string(op) +
                                        " not allowed in phase " +
                                        std::string(party_phase_name(phase)));
}

}  // namespace

// ---- Initiator ----

void Initiator::require(PartyPhase expected, std::string_view op) const {
  if (phase_ != expected) order_error("Initiator", op, phase_);
}

MsgShareKeyRequest Initiator::begin_registration(Contract contract) {
  require(PartyPhase::Init, "begin_registration");
  if (c_at_ || contract_) order_error("Initiator", "begin_registration", phase_);
  contract_ = std::move(contract);
  return MsgShareKeyRequest{keys_.pub};
}

MsgCertRequest Initiator::accept_shared_key_cert(const SharedKeyCert& c_at) {
  require(PartyPhase::Init, "accept_shared_key_cert");
  if (!contract_ || c_at_) order_error("Initiator", "accept_shared_key_cert", phase_);
  if (!verify_shared_key_cert(c_at, keyring_.at(PartyId::TTP), slot(Phase::registration)))
    throw Error(Errc::certificate_rejected, "shared-key certificate does not verify");
  c_at_ = c_at;
  own_sig_ = sign(contract_->body(), keys_.priv, slot(Phase::registration));
  return MsgCertRequest{*own_sig_, *contract_, *c_at_};
}

void Initiator::accept_contract_cert(const ContractCert& c_cert) {
  require(PartyPhase::Init, "accept_contract_cert");
  if (!own_sig_) order_error("Initiator", "accept_contract_cert", phase_);
  if (c_cert.h_c != contract_->digest())
    throw Error(Errc::certificate_rejected, "contract certificate names another contract");
  c_cert_ = c_cert;
  phase_ = PartyPhase::Registered;
}

Registration Initiator::register_with(Contract contract, TrustedParty& ttp,
                                      CertificateAuthority& ca) {
  auto share_req = begin_registration(std::move(contract));
  auto c_at = ttp.issue_shared_key(share_req.initiator_pk);
  auto cert_req = accept_shared_key_cert(c_at);
  auto grant = ca.issue_contract_cert(
      ContractCertRequest{cert_req.sig_a, cert_req.contract, cert_req.c_at}, keys_.pub);
  accept_contract_cert(grant.cert);
  return Registration{c_at, grant.cert, grant.enc_sig};
}

EncryptedSignature Initiator::encrypt_own_signature() {
  if (!own_sig_ || !c_at_) order_error("Initiator", "encrypt_own_signature", phase_);
  return EncryptedSignature{rsa_encrypt(own_sig_->value, c_at_->shared_pk, slot(Phase::exchange))};
}

MsgEM1 Initiator::build_em1() {
  require(PartyPhase::Registered, "build_em1");
  auto enc = encrypt_own_signature();
  // Textbook RSA is deterministic, so this must reproduce the certified heSig.
  if (encrypted_signature_digest(enc) != c_cert_->he_sig)
    throw Error(Errc::certificate_rejected, "local ciphertext does not match heSig");
  phase_ = PartyPhase::Em1Sent;
  return MsgEM1{*contract_, *c_at_, *c_cert_, std::move(enc)};
}

bool Initiator::verify_em2(const MsgEM2& msg) {
  require(PartyPhase::Em1Sent, "verify_em2");
  if (!signature_matches(c_cert_->h_c, msg.sig_b, keyring_.at(PartyId::B), slot(Phase::exchange))) {
    phase_ = PartyPhase::Aborted;
    return false;
  }
  counterpart_sig_ = msg.sig_b;
  phase_ = PartyPhase::Em2Verified;
  return true;
}

MsgEM3 Initiator::build_em3() {
  require(PartyPhase::Em2Verified, "build_em3");
  phase_ = PartyPhase::Em3Sent;
  return MsgEM3{*own_sig_};
}

std::optional<MsgEM3> Initiator::on_em2(const MsgEM2& msg) {
  if (!verify_em2(msg)) return std::nullopt;
  return build_em3();
}

void Initiator::apply_drm2(const MsgDRM2& msg) {
  if (!c_cert_) order_error("Initiator", "apply_drm2", phase_);
  if (!signature_matches(c_cert_->h_c, msg.sig_b, keyring_.at(PartyId::B), slot(Phase::dispute)))
    throw Error(Errc::trusted_party_violation, "DR-M2 carries an invalid responder signature");
  counterpart_sig_ = msg.sig_b;
  phase_ = PartyPhase::Resolved;
}

// ---- Responder ----

void Responder::require(PartyPhase expected, std::string_view op) const {
  if (phase_ != expected) order_error("Responder", op, phase_);
}

Verdict Responder::verify_em1(const MsgEM1& msg) {
  require(PartyPhase::Init, "verify_em1");
  auto reject = [this](RejectReason reason) {
    phase_ = PartyPhase::Aborted;
    last_rejection_ = reason;
    return Verdict::reject(reason);
  };

  const auto cert_slot = slot(Phase::exchange);
  bool c_at_ok = verify_shared_key_cert(msg.c_at, keyring_.at(PartyId::TTP), cert_slot);
  bool c_cert_ok = verify_contract_cert(msg.c_cert, keyring_.at(PartyId::CA), cert_slot);
  if (!c_at_ok || !c_cert_ok) return reject(RejectReason::cert_invalid);

  if (msg.contract.digest() != msg.c_cert.h_c || msg.contract != agreed_)
    return reject(RejectReason::contract_mismatch);

  if (encrypted_signature_digest(msg.enc_sig_a) != msg.c_cert.he_sig)
    return reject(RejectReason::ciphertext_mismatch);

  em1_ = msg;
  phase_ = PartyPhase::Em1Verified;
  return Verdict::accept();
}

MsgEM2 Responder::build_em2() {
  require(PartyPhase::Em1Verified, "build_em2");
  own_sig_ = sign(agreed_.body(), keys_.priv, slot(Phase::exchange));
  phase_ = PartyPhase::Em2Sent;
  return MsgEM2{*own_sig_};
}

Verdict Responder::verify_em3(const MsgEM3& msg) {
  require(PartyPhase::Em2Sent, "verify_em3");
  if (!signature_matches(em1_->c_cert.h_c, msg.sig_a, keyring_.at(PartyId::A),
                         slot(Phase::exchange))) {
    phase_ = PartyPhase::DisputePending;
    return Verdict::reject(RejectReason::encrypted_signature_invalid);
  }
  counterpart_sig_ = msg.sig_a;
  phase_ = PartyPhase::Done;
  return Verdict::accept();
}

void Responder::on_timeout() {
  require(PartyPhase::Em2Sent, "on_timeout");
  phase_ = PartyPhase::DisputePending;
}

MsgDRM1 Responder::build_drm1() const {
  require(PartyPhase::DisputePending, "build_drm1");
  return MsgDRM1{em1_->contract, em1_->c_at, em1_->c_cert, em1_->enc_sig_a, *own_sig_};
}

void Responder::apply_drm3(const MsgDRM3& msg) {
  if (phase_ != PartyPhase::DisputePending && phase_ != PartyPhase::Em1Verified)
    order_error("Responder", "apply_drm3", phase_);
  if (!signature_matches(em1_->c_cert.h_c, msg.sig_a, keyring_.at(PartyId::A),
                         slot(Phase::dispute)))
    throw Error(Errc::trusted_party_violation, "DR-M3 carries an invalid initiator signature");
  counterpart_sig_ = msg.sig_a;
  phase_ = PartyPhase::Resolved;
}

void Responder::apply_rejection(const MsgDisputeRejected& msg) {
  if (phase_ != PartyPhase::DisputePending && phase_ != PartyPhase::Em1Verified)
    order_error("Responder", "apply_rejection", phase_);
  last_rejection_ = msg.reason;
  phase_ = PartyPhase::Aborted;
}

// ---- TrustedParty ----

SharedKeyCert TrustedParty::issue_shared_key(const RsaPublicKey& initiator_pk) {
  std::optional<std::uint64_t> seed;
  if (options_.shared_key_seed) seed = *options_.shared_key_seed + (next_serial_.get_ui() - 1);
  return issue_shared_key(initiator_pk,
                          generate_keypair(initiator_pk.bits() + options_.shared_extra_bits, seed));
}

SharedKeyCert TrustedParty::issue_shared_key(const RsaPublicKey& initiator_pk, RsaKeyPair shared) {
  auto cert = issue_shared_key_cert(keys_, initiator_pk, shared.pub, next_serial_,
                                    slot(Phase::registration));
  next_serial_ += 1;
  shared_keys_[shared.pub.n] = std::move(shared.priv);
  return cert;
}

DisputeOutcome TrustedParty::resolve(const MsgDRM1& msg) {
  ++disputes_received_;
  const Digest& h_c = msg.c_cert.h_c;
  if (auto it = ledger_.find(h_c); it != ledger_.end())
    return Resolution{MsgDRM2{it->second.second}, MsgDRM3{it->second.first}};

  auto reject = [&](RejectReason reason) -> DisputeOutcome {
    return MsgDisputeRejected{h_c, reason};
  };
  const auto s = slot(Phase::dispute);

  if (!verify_shared_key_cert(msg.c_at, keys_.pub, s)) return reject(RejectReason::cert_invalid);
  if (!verify_contract_cert(msg.c_cert, keyring_.at(PartyId::CA), s))
    return reject(RejectReason::cert_invalid);
  auto shared = shared_keys_.find(msg.c_at.shared_pk.n);
  if (shared == shared_keys_.end()) return reject(RejectReason::cert_invalid);
  if (msg.contract.digest() != h_c) return reject(RejectReason::contract_mismatch);

  const auto& pk_a = keyring_.at(msg.c_at.subject_initiator);
  const auto& pk_b = keyring_.at(PartyId::B);
  if (msg.enc_sig_a.value < 0 || msg.enc_sig_a.value >= shared->second.n)
    return reject(RejectReason::encrypted_signature_invalid);

  Signature sig_a;
  if (options_.check == DisputeCheck::decrypt_verify) {
    sig_a.value = rsa_decrypt(msg.enc_sig_a.value, shared->second, s);
    sig_a.signer_modulus_bits = static_cast<std::uint32_t>(pk_a.bits());
    if (!signature_matches(h_c, sig_a, pk_a, s))
      return reject(RejectReason::encrypted_signature_invalid);
    if (!signature_matches(h_c, msg.sig_b, pk_b, s)) return reject(RejectReason::sig_b_invalid);
  } else {
    if (encrypted_signature_digest(msg.enc_sig_a) != msg.c_cert.he_sig)
      return reject(RejectReason::encrypted_signature_invalid);
    if (!signature_matches(h_c, msg.sig_b, pk_b, s)) return reject(RejectReason::sig_b_invalid);
    sig_a.value = rsa_decrypt(msg.enc_sig_a.value, shared->second, s);
    sig_a.signer_modulus_bits = static_cast<std::uint32_t>(pk_a.bits());
  }

  ledger_.emplace(h_c, std::make_pair(sig_a, msg.sig_b));
  return Resolution{MsgDRM2{msg.sig_b}, MsgDRM3{sig_a}};
}

}  // namespace fairsign
