#include "fairsign/messages.hpp"

namespace fairsign {

std::string_view msg_type_name(MsgType type) {
  switch (type) {
    case MsgType::em1: return "EM1";
    case MsgType::em2: return "EM2";
    case MsgType::em3: return "EM3";
    case MsgType::drm1: return "DRM1";
    case MsgType::drm2: return "DRM2";
    case MsgType::drm3: return "DRM3";
    case MsgType::share_key_request: return "REG_SHARE_KEY_REQ";
    case MsgType::share_key_response: return "REG_SHARE_KEY_RESP";
    case MsgType::cert_request: return "REG_CERT_REQ";
    case MsgType::cert_response: return "REG_CERT_RESP";
    case MsgType::dispute_rejected: return "DR_REJECTED";
  }
  return "?";
}

std::string_view reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::cert_invalid: return "cert-invalid";
    case RejectReason::contract_mismatch: return "contract-mismatch";
    case RejectReason::ciphertext_mismatch: return "ciphertext-mismatch";
    case RejectReason::encrypted_signature_invalid: return "encrypted-signature-invalid";
    case RejectReason::sig_b_invalid: return "sig-b-invalid";
  }
  return "?";
}

MsgType message_type(const ProtocolMessage& msg) {
  return static_cast<MsgType>(msg.index() + 1);
}

Bytes encode_signature(const Signature& sig) {
  FieldWriter w;
  w.integer(sig.value).integer(sig.signer_modulus_bits);
  return std::move(w).take();
}

Signature decode_signature(ByteView octets, Errc failure) {
  FieldReader in(octets, failure);
  Signature sig;
  sig.value = in.integer();
  BigInt bits = in.integer();
  if (!bits.fits_uint_p()) throw Error(failure, "signature bit length");
  sig.signer_modulus_bits = static_cast<std::uint32_t>(bits.get_ui());
  in.expect_end();
  return sig;
}

Bytes encode_public_key(const RsaPublicKey& pk) {
  FieldWriter w;
  w.integer(pk.e).integer(pk.n);
  return std::move(w).take();
}

RsaPublicKey decode_public_key(ByteView octets, Errc failure) {
  FieldReader in(octets, failure);
  RsaPublicKey pk;
  pk.e = in.integer();
  pk.n = in.integer();
  in.expect_end();
  return pk;
}

namespace {

Bytes digest_bytes(const Digest& d) { return Bytes(d.bytes.begin(), d.bytes.end()); }

Digest read_digest(FieldReader& in) {
  auto view = in.field();
  if (view.size() != Digest::kSize) throw Error(Errc::malformed_message, "digest length");
  Digest d;
  std::copy(view.begin(), view.end(), d.bytes.begin());
  return d;
}

struct Encoder {
  FieldWriter& w;

  void operator()(const MsgEM1& m) {
    w.field(m.contract.body()).field(m.c_at.serialize()).field(m.c_cert.serialize()).integer(
        m.enc_sig_a.value);
  }
  void operator()(const MsgEM2& m) { w.field(encode_signature(m.sig_b)); }
  void operator()(const MsgEM3& m) { w.field(encode_signature(m.sig_a)); }
  void operator()(const MsgDRM1& m) {
    w.field(m.contract.body())
        .field(m.c_at.serialize())
        .field(m.c_cert.serialize())
        .integer(m.enc_sig_a.value)
        .field(encode_signature(m.sig_b));
  }
  void operator()(const MsgDRM2& m) { w.field(encode_signature(m.sig_b)); }
  void operator()(const MsgDRM3& m) { w.field(encode_signature(m.sig_a)); }
  void operator()(const MsgShareKeyRequest& m) { w.field(encode_public_key(m.initiator_pk)); }
  void operator()(const MsgShareKeyResponse& m) { w.field(m.c_at.serialize()); }
  void operator()(const MsgCertRequest& m) {
    w.field(encode_signature(m.sig_a)).field(m.contract.body()).field(m.c_at.serialize());
  }
  void operator()(const MsgCertResponse& m) {
    w.field(m.c_cert.serialize()).integer(m.enc_sig_a.value);
  }
  void operator()(const MsgDisputeRejected& m) {
    w.field(digest_bytes(m.h_c)).octet(static_cast<std::uint8_t>(m.reason));
  }
};

Contract read_contract(FieldReader& in) {
  auto body = in.field_bytes();
  if (body.empty()) throw Error(Errc::malformed_message, "empty contract");
  return Contract(std::move(body));
}

ProtocolMessage decode_body(MsgType type, FieldReader& in) {
  switch (type) {
    case MsgType::em1: {
      auto contract = read_contract(in);
      auto c_at = SharedKeyCert::parse(in.field());
      auto c_cert = ContractCert::parse(in.field());
      EncryptedSignature enc{in.integer()};
      return MsgEM1{std::move(contract), std::move(c_at), std::move(c_cert), std::move(enc)};
    }
    case MsgType::em2: return MsgEM2{decode_signature(in.field())};
    case MsgType::em3: return MsgEM3{decode_signature(in.field())};
    case MsgType::drm1: {
      auto contract = read_contract(in);
      auto c_at = SharedKeyCert::parse(in.field());
      auto c_cert = ContractCert::parse(in.field());
      EncryptedSignature enc{in.integer()};
      auto sig_b = decode_signature(in.field());
      return MsgDRM1{std::move(contract), std::move(c_at), std::move(c_cert), std::move(enc),
                     std::move(sig_b)};
    }
    case MsgType::drm2: return MsgDRM2{decode_signature(in.field())};
    case MsgType::drm3: return MsgDRM3{decode_signature(in.field())};
    case MsgType::share_key_request: return MsgShareKeyRequest{decode_public_key(in.field())};
    case MsgType::share_key_response: return MsgShareKeyResponse{SharedKeyCert::parse(in.field())};
    case MsgType::cert_request: {
      auto sig = decode_signature(in.field());
      auto contract = read_contract(in);
      auto c_at = SharedKeyCert::parse(in.field());
      return MsgCertRequest{std::move(sig), std::move(contract), std::move(c_at)};
    }
    case MsgType::cert_response: {
      auto cert = ContractCert::parse(in.field());
      return MsgCertResponse{std::move(cert), EncryptedSignature{in.integer()}};
    }
    case MsgType::dispute_rejected: {
      auto h_c = read_digest(in);
      auto raw = in.octet();
      if (raw < 1 || raw > 5) throw Error(Errc::malformed_message, "unknown rejection reason");
      return MsgDisputeRejected{h_c, static_cast<RejectReason>(raw)};
    }
  }
  throw Error(Errc::malformed_message, "unknown message tag");
}

}  // namespace

Bytes encode_message(const ProtocolMessage& msg) {
  Bytes out{static_cast<std::uint8_t>(message_type(msg))};
  FieldWriter w;
  std::visit(Encoder{w}, msg);
  const auto& body = w.bytes();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

ProtocolMessage decode_message(ByteView wire) {
  if (wire.empty()) throw Error(Errc::malformed_message, "empty message");
  auto tag = wire.front();
  if (tag < 1 || tag > 11) throw Error(Errc::malformed_message, "unknown message tag");
  FieldReader in(wire.subspan(1), Errc::malformed_message);
  try {
    auto msg = decode_body(static_cast<MsgType>(tag), in);
    in.expect_end();
    return msg;
  } catch (const Error& e) {
    if (e.code() == Errc::malformed_message) throw;
    throw Error(Errc::malformed_message, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::malformed_message, e.what());
  }
}

Bytes frame(ByteView payload) {
  if (payload.size() > kMaxFrameBytes) throw Error(Errc::malformed_message, "frame too large");
  Bytes out;
  out.reserve(payload.size() + 4);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

}  // namespace fairsign
