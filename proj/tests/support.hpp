#pragma once

// Shared helpers for the test binaries. Oracles here are deliberately naive
// and do not call into the library's arithmetic.

#include <cstdint>
#include <random>

#include "fairsign/simulation.hpp"

namespace fairsign::testing {

// Repeated multiplication with machine integers; only for small moduli.
inline std::uint64_t naive_mod_exp(std::uint64_t base, std::uint64_t exponent,
                                   std::uint64_t modulus) {
  std::uint64_t result = 1 % modulus;
  for (std::uint64_t i = 0; i < exponent; ++i) result = result * base % modulus;
  return result;
}

inline const ScenarioKeys& keys_seed1() {
  static const ScenarioKeys keys = derive_keys(1, 512);
  return keys;
}

inline RsaKeyPair toy_key() {
  // p=61, q=53, e=17, d=2753
  return RsaKeyPair{RsaPublicKey{17, 3233}, RsaPrivateKey{2753, 3233, 61, 53}};
}

inline BigInt random_below(std::mt19937_64& rng, const BigInt& bound) {
  BigInt acc = 0;
  for (std::size_t bits = 0; bits < bit_length(bound) + 64; bits += 64) {
    acc <<= 64;
    acc += BigInt(std::to_string(rng()));
  }
  return acc % bound;
}

// Everything an in-process exchange needs, registered and ready for E-M1.
struct Session {
  ExpCounter counter;
  ScenarioKeys keys = keys_seed1();
  Keyring keyring = keys.keyring();
  Contract contract = Contract::from_text("Lease of unit 4B for 12 months at 900 per month.");
  TrustedParty ttp;
  CertificateAuthority ca;
  Initiator a;
  Responder b;
  Registration reg;

  explicit Session(TrustedParty::Options options = {})
      : ttp(keys.ttp, keyring, &counter, with_seed(options)),
        ca(keys.ca, keys.ttp.pub, &counter),
        a(keys.a, keyring, &counter),
        b(keys.b, keyring, contract, &counter),
        reg(a.register_with(contract, ttp, ca)) {}

  static TrustedParty::Options with_seed(TrustedParty::Options o) {
    if (!o.shared_key_seed) o.shared_key_seed = 99;
    return o;
  }
};

}  // namespace fairsign::testing
