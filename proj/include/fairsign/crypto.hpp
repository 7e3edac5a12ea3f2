#pragma once

// Textbook RSA over GMP integers: unpadded and deterministic, so two parties
// encrypting the same signature under the same key get the same ciphertext.
// Every modular exponentiation performed on behalf of a protocol role can be
// booked to an ExpCounter slot.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>

#include "fairsign/codec.hpp"

namespace fairsign {

inline constexpr std::size_t kMinModulusBits = 264;
inline constexpr unsigned long kDefaultPublicExponent = 65537;

enum class PartyId : std::uint8_t { A = 1, B = 2, TTP = 3, CA = 4 };
enum class Phase : std::uint8_t { registration = 1, exchange = 2, dispute = 3 };

std::string_view party_name(PartyId id);
std::string_view phase_name(Phase phase);
std::optional<PartyId> parse_party(std::string_view name);

struct RsaPublicKey {
  BigInt e;
  BigInt n;

  std::size_t bits() const { return bit_length(n); }
  friend bool operator==(const RsaPublicKey&, const RsaPublicKey&) = default;
};

struct RsaPrivateKey {
  BigInt d;
  BigInt n;
  // Primes are kept when we generated the key ourselves; loaded public-only
  // material leaves them zero.
  BigInt p;
  BigInt q;

  friend bool operator==(const RsaPrivateKey&, const RsaPrivateKey&) = default;
};

struct RsaKeyPair {
  RsaPublicKey pub;
  RsaPrivateKey priv;

  friend bool operator==(const RsaKeyPair&, const RsaKeyPair&) = default;
};

struct Digest {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> bytes{};

  BigInt to_int() const { return int_from_bytes(bytes); }
  std::string hex() const { return to_hex(bytes); }
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

struct Signature {
  BigInt value;
  std::uint32_t signer_modulus_bits = 0;

  friend bool operator==(const Signature&, const Signature&) = default;
};

struct EncryptedSignature {
  BigInt value;

  friend bool operator==(const EncryptedSignature&, const EncryptedSignature&) = default;
};

class ExpCounter {
 public:
  void increment(PartyId party, Phase phase) { ++counts_[{party, phase}]; }
  std::uint64_t get(PartyId party, Phase phase) const;
  std::uint64_t phase_total(Phase phase) const;
  std::uint64_t total() const;
  void reset() { counts_.clear(); }
  const std::map<std::pair<PartyId, Phase>, std::uint64_t>& counts() const { return counts_; }

  friend bool operator==(const ExpCounter&, const ExpCounter&) = default;

 private:
  std::map<std::pair<PartyId, Phase>, std::uint64_t> counts_;
};

// Where an exponentiation is booked. A default-constructed slot books nothing.
struct CountSlot {
  ExpCounter* counter = nullptr;
  PartyId party = PartyId::A;
  Phase phase = Phase::exchange;

  void bump() const {
    if (counter) counter->increment(party, phase);
  }
};

BigInt mod_exp(const BigInt& base, const BigInt& exponent, const BigInt& modulus,
               const CountSlot& slot = {});

// Deterministic when `seed` is given; otherwise seeded from the OS.
RsaKeyPair generate_keypair(std::size_t bits, std::optional<std::uint64_t> seed = std::nullopt);

Digest hash(ByteView data);
Digest hash(std::string_view text);

BigInt rsa_encrypt(const BigInt& m, const RsaPublicKey& pk, const CountSlot& slot = {});
BigInt rsa_decrypt(const BigInt& c, const RsaPrivateKey& sk, const CountSlot& slot = {});

Signature sign(ByteView message, const RsaPrivateKey& sk, const CountSlot& slot = {});
bool verify_sig(ByteView message, const Signature& sig, const RsaPublicKey& pk,
                const CountSlot& slot = {});

// Compares the recovered hash against an already-known digest, which is how
// parties check a counterpart signature against the certified contract hash.
bool verify_digest(const Digest& expected, const Signature& sig, const RsaPublicKey& pk,
                   const CountSlot& slot = {});

}  // namespace fairsign
