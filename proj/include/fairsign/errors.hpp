#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairsign {

enum class Errc {
  invalid_modulus,
  modulus_too_small,
  plaintext_too_large,
  ciphertext_out_of_range,
  malformed_signature,
  shared_modulus_too_small,
  malformed_certificate,
  signature_rejected,
  certificate_rejected,
  malformed_message,
  protocol_order,
  trusted_party_violation,
  livelock,
  malformed_key_file,
  usage,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fairsign
