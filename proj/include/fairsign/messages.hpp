#pragma once

// Protocol messages and their wire form: a 1-octet type tag followed by the
// length-prefixed fields in declared order. Composite fields (certificates,
// signatures, keys) occupy one field holding their own canonical encoding.
//
// Tags 1..6 are the exchange and dispute messages. Tags 7..10 carry
// registration over a network, and 11 is the TTP's answer to a rejected
// dispute.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "fairsign/certs.hpp"

namespace fairsign {

enum class MsgType : std::uint8_t {
  em1 = 1,
  em2 = 2,
  em3 = 3,
  drm1 = 4,
  drm2 = 5,
  drm3 = 6,
  share_key_request = 7,
  share_key_response = 8,
  cert_request = 9,
  cert_response = 10,
  dispute_rejected = 11,
};

std::string_view msg_type_name(MsgType type);

enum class RejectReason : std::uint8_t {
  cert_invalid = 1,
  contract_mismatch = 2,
  ciphertext_mismatch = 3,
  encrypted_signature_invalid = 4,
  sig_b_invalid = 5,
};

std::string_view reject_reason_name(RejectReason reason);

struct MsgEM1 {
  Contract contract;
  SharedKeyCert c_at;
  ContractCert c_cert;
  EncryptedSignature enc_sig_a;
  friend bool operator==(const MsgEM1&, const MsgEM1&) = default;
};

struct MsgEM2 {
  Signature sig_b;
  friend bool operator==(const MsgEM2&, const MsgEM2&) = default;
};

struct MsgEM3 {
  Signature sig_a;
  friend bool operator==(const MsgEM3&, const MsgEM3&) = default;
};

struct MsgDRM1 {
  Contract contract;
  SharedKeyCert c_at;
  ContractCert c_cert;
  EncryptedSignature enc_sig_a;
  Signature sig_b;
  friend bool operator==(const MsgDRM1&, const MsgDRM1&) = default;
};

struct MsgDRM2 {
  Signature sig_b;
  friend bool operator==(const MsgDRM2&, const MsgDRM2&) = default;
};

struct MsgDRM3 {
  Signature sig_a;
  friend bool operator==(const MsgDRM3&, const MsgDRM3&) = default;
};

struct MsgShareKeyRequest {
  RsaPublicKey initiator_pk;
  friend bool operator==(const MsgShareKeyRequest&, const MsgShareKeyRequest&) = default;
};

struct MsgShareKeyResponse {
  SharedKeyCert c_at;
  friend bool operator==(const MsgShareKeyResponse&, const MsgShareKeyResponse&) = default;
};

struct MsgCertRequest {
  Signature sig_a;
  Contract contract;
  SharedKeyCert c_at;
  friend bool operator==(const MsgCertRequest&, const MsgCertRequest&) = default;
};

struct MsgCertResponse {
  ContractCert c_cert;
  EncryptedSignature enc_sig_a;
  friend bool operator==(const MsgCertResponse&, const MsgCertResponse&) = default;
};

struct MsgDisputeRejected {
  Digest h_c;
  RejectReason reason = RejectReason::cert_invalid;
  friend bool operator==(const MsgDisputeRejected&, const MsgDisputeRejected&) = default;
};

using ProtocolMessage =
    std::variant<MsgEM1, MsgEM2, MsgEM3, MsgDRM1, MsgDRM2, MsgDRM3, MsgShareKeyRequest,
                 MsgShareKeyResponse, MsgCertRequest, MsgCertResponse, MsgDisputeRejected>;

MsgType message_type(const ProtocolMessage& msg);

Bytes encode_message(const ProtocolMessage& msg);
ProtocolMessage decode_message(ByteView wire);

// TCP framing: 4-octet big-endian payload length, then the payload.
inline constexpr std::uint32_t kMaxFrameBytes = 1u << 20;
Bytes frame(ByteView payload);

Bytes encode_signature(const Signature& sig);
Signature decode_signature(ByteView octets, Errc failure = Errc::malformed_message);
Bytes encode_public_key(const RsaPublicKey& pk);
RsaPublicKey decode_public_key(ByteView octets, Errc failure = Errc::malformed_message);

}  // namespace fairsign
