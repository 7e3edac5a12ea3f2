#include "fairsign/crypto.hpp"

#include <random>
#include <stdexcept>

#include <openssl/evp.h>

namespace fairsign {

std::string_view party_name(PartyId id) {
  switch (id) {
    case PartyId::A: return "A";
    case PartyId::B: return "B";
    case PartyId::TTP: return "TTP";
    case PartyId::CA: return "CA";
  }
  return "?";
}

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::registration: return "registration";
    case Phase::exchange: return "exchange";
    case Phase::dispute: return "dispute";
  }
  return "?";
}

std::optional<PartyId> parse_party(std::string_view name) {
  for (auto id : {PartyId::A, PartyId::B, PartyId::TTP, PartyId::CA})
    if (party_name(id) == name) return id;
  return std::nullopt;
}

std::uint64_t ExpCounter::get(PartyId party, Phase phase) const {
  auto it = counts_.find({party, phase});
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t ExpCounter::phase_total(Phase phase) const {
  std::uint64_t sum = 0;
  for (const auto& [key, count] : counts_)
    if (key.second == phase) sum += count;
  return sum;
}

std::uint64_t ExpCounter::total() const {
  std::uint64_t sum = 0;
  for (const auto& [key, count] : counts_) sum += count;
  return sum;
}

BigInt mod_exp(const BigInt& base, const BigInt& exponent, const BigInt& modulus,
               const CountSlot& slot) {
  if (modulus <= 1) throw Error(Errc::invalid_modulus, "modulus must exceed 1");
  if (exponent < 0) throw std::invalid_argument("mod_exp: negative exponent");
  if (base < 0 || base >= modulus) throw std::invalid_argument("mod_exp: base outside [0, modulus)");
  BigInt result;
  mpz_powm(result.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  slot.bump();
  return result;
}

namespace {

// Candidate has exactly `bits` bits with the top two set, so the product of
// two such primes always has the full combined length.
BigInt random_prime(gmp_randclass& rng, std::size_t bits) {
  for (;;) {
    BigInt candidate = rng.get_z_bits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (mpz_probab_prime_p(candidate.get_mpz_t(), 40) > 0) return candidate;
  }
}

}  // namespace

RsaKeyPair generate_keypair(std::size_t bits, std::optional<std::uint64_t> seed) {
  if (bits < kMinModulusBits)
    throw Error(Errc::modulus_too_small,
                "requested " + std::to_string(bits) + " bits, need at least " +
                    std::to_string(kMinModulusBits));

  gmp_randclass rng(gmp_randinit_mt);
  if (seed) {
    rng.seed(BigInt(std::to_string(*seed)));
  } else {
    std::random_device rd;
    rng.seed((static_cast<unsigned long>(rd()) << 32) ^ rd());
  }

  const BigInt e = kDefaultPublicExponent;
  const std::size_t p_bits = (bits + 1) / 2;
  const std::size_t q_bits = bits - p_bits;
  for (;;) {
    BigInt p = random_prime(rng, p_bits);
    BigInt q = random_prime(rng, q_bits);
    if (p == q) continue;
    BigInt phi = (p - 1) * (q - 1);
    BigInt g;
    mpz_gcd(g.get_mpz_t(), e.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;
    BigInt d;
    mpz_invert(d.get_mpz_t(), e.get_mpz_t(), phi.get_mpz_t());
    BigInt n = p * q;
    if (bit_length(n) != bits || d <= 1) continue;
    if (p < q) std::swap(p, q);
    return RsaKeyPair{RsaPublicKey{e, n}, RsaPrivateKey{d, n, p, q}};
  }
}

Digest hash(ByteView data) {
  Digest out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != Digest::kSize)
    throw std::runtime_error("SHA-256 digest failed");
  return out;
}

Digest hash(std::string_view text) {
  return hash(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

BigInt rsa_encrypt(const BigInt& m, const RsaPublicKey& pk, const CountSlot& slot) {
  if (m < 0 || m >= pk.n) throw Error(Errc::plaintext_too_large, "plaintext not in [0, n)");
  return mod_exp(m, pk.e, pk.n, slot);
}

BigInt rsa_decrypt(const BigInt& c, const RsaPrivateKey& sk, const CountSlot& slot) {
  if (c < 0 || c >= sk.n) throw Error(Errc::ciphertext_out_of_range, "ciphertext not in [0, n)");
  return mod_exp(c, sk.d, sk.n, slot);
}

Signature sign(ByteView message, const RsaPrivateKey& sk, const CountSlot& slot) {
  auto bits = bit_length(sk.n);
  if (bits < kMinModulusBits) throw Error(Errc::modulus_too_small, "signing key modulus too small");
  return Signature{mod_exp(hash(message).to_int(), sk.d, sk.n, slot),
                   static_cast<std::uint32_t>(bits)};
}

bool verify_digest(const Digest& expected, const Signature& sig, const RsaPublicKey& pk,
                   const CountSlot& slot) {
  if (sig.value < 0 || sig.value >= pk.n)
    throw Error(Errc::malformed_signature, "signature value not below the signer's modulus");
  return mod_exp(sig.value, pk.e, pk.n, slot) == expected.to_int();
}

bool verify_sig(ByteView message, const Signature& sig, const RsaPublicKey& pk,
                const CountSlot& slot) {
  return verify_digest(hash(message), sig, pk, slot);
}

}  // namespace fairsign
