#include "fairsign/errors.hpp"

namespace fairsign {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_modulus: return "invalid-modulus";
    case Errc::modulus_too_small: return "modulus-too-small";
    case Errc::plaintext_too_large: return "plaintext-too-large";
    case Errc::ciphertext_out_of_range: return "ciphertext-out-of-range";
    case Errc::malformed_signature: return "malformed-signature";
    case Errc::shared_modulus_too_small: return "shared-modulus-too-small";
    case Errc::malformed_certificate: return "malformed-certificate";
    case Errc::signature_rejected: return "signature-rejected";
    case Errc::certificate_rejected: return "certificate-rejected";
    case Errc::malformed_message: return "malformed-message";
    case Errc::protocol_order: return "protocol-order";
    case Errc::trusted_party_violation: return "trusted-party-violation";
    case Errc::livelock: return "livelock";
    case Errc::malformed_key_file: return "malformed-key-file";
    case Errc::usage: return "usage";
  }
  return "unknown";
}

}  // namespace fairsign
