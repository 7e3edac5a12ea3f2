#include <doctest.h>

#include "fairsign/crypto.hpp"
#include "support.hpp"

using namespace fairsign;
using fairsign::testing::naive_mod_exp;

TEST_CASE("mod_exp known values") {
  CHECK(mod_exp(5, 0, 7) == 1);
  CHECK(mod_exp(4, 13, 497) == 445);
  CHECK(mod_exp(65, 17, 3233) == 2790);
}

TEST_CASE("mod_exp agrees with repeated multiplication") {
  // Desk-scale slice of the exhaustive check; the acceptance suite runs all
  // moduli below 1000.
  for (std::uint64_t m = 2; m < 120; ++m)
    for (std::uint64_t b = 0; b < m; ++b)
      for (std::uint64_t e = 0; e < 50; ++e)
        REQUIRE(mod_exp(b, e, m) == naive_mod_exp(b, e, m));
}

TEST_CASE("mod_exp rejects degenerate moduli") {
  for (int m : {1, 0, -5}) {
    try {
      mod_exp(0, 3, m);
      FAIL("expected invalid-modulus");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_modulus);
    }
  }
  CHECK_THROWS_AS(mod_exp(7, 2, 7), std::invalid_argument);
  CHECK_THROWS_AS(mod_exp(2, -1, 7), std::invalid_argument);
}

TEST_CASE("mod_exp books exactly one exponentiation to its slot") {
  ExpCounter counter;
  mod_exp(3, 5, 11, {&counter, PartyId::B, Phase::dispute});
  mod_exp(3, 5, 11);
  CHECK(counter.get(PartyId::B, Phase::dispute) == 1);
  CHECK(counter.total() == 1);
}

TEST_CASE("SHA-256 vectors") {
  CHECK(hash("").hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hash("abc").hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(hash("contract") == hash("contract"));
}

TEST_CASE("generate_keypair") {
  auto k1 = generate_keypair(512, 1);
  auto k2 = generate_keypair(512, 1);
  CHECK(k1 == k2);
  CHECK(k1.pub.bits() == 512);
  CHECK(k1.pub.e == 65537);
  CHECK(rsa_decrypt(rsa_encrypt(42, k1.pub), k1.priv) == 42);

  SUBCASE("e*d = 1 mod phi(n) from the retained primes") {
    const auto& p = k1.priv.p;
    const auto& q = k1.priv.q;
    CHECK(p * q == k1.pub.n);
    BigInt phi = (p - 1) * (q - 1);
    BigInt prod = k1.pub.e * k1.priv.d;
    CHECK(BigInt(prod % phi) == 1);
    CHECK(mpz_probab_prime_p(p.get_mpz_t(), 25) > 0);
    CHECK(mpz_probab_prime_p(q.get_mpz_t(), 25) > 0);
  }

  SUBCASE("odd and minimum sizes") {
    CHECK(generate_keypair(264, 3).pub.bits() == 264);
    CHECK(generate_keypair(529, 3).pub.bits() == 529);
  }

  SUBCASE("different seeds differ") { CHECK(generate_keypair(512, 2).pub.n != k1.pub.n); }

  SUBCASE("undersized request") {
    try {
      generate_keypair(263, 1);
      FAIL("expected modulus-too-small");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::modulus_too_small);
    }
  }
}

TEST_CASE("textbook RSA with the toy key") {
  auto k = fairsign::testing::toy_key();
  CHECK(rsa_encrypt(65, k.pub) == 2790);
  CHECK(rsa_decrypt(2790, k.priv) == 65);
  CHECK(rsa_encrypt(0, k.pub) == 0);
  CHECK(rsa_encrypt(1, k.pub) == 1);
  CHECK(rsa_decrypt(0, k.priv) == 0);

  try {
    rsa_encrypt(3233, k.pub);
    FAIL("expected plaintext-too-large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::plaintext_too_large);
  }
  try {
    rsa_decrypt(5000, k.priv);
    FAIL("expected ciphertext-out-of-range");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ciphertext_out_of_range);
  }
}

TEST_CASE("round trip over random plaintexts") {
  const auto& k = fairsign::testing::keys_seed1().a;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    BigInt m = fairsign::testing::random_below(rng, k.pub.n);
    REQUIRE(rsa_decrypt(rsa_encrypt(m, k.pub), k.priv) == m);
  }
}

TEST_CASE("sign and verify") {
  const auto& keys = fairsign::testing::keys_seed1();
  auto msg = to_bytes("contract");
  auto sig = sign(msg, keys.a.priv);

  CHECK(sig.signer_modulus_bits == 512);
  CHECK(verify_sig(msg, sig, keys.a.pub));
  CHECK(sig != sign(to_bytes("contract2"), keys.a.priv));
  CHECK(sig.value == mod_exp(hash("contract").to_int(), keys.a.priv.d, keys.a.priv.n));

  SUBCASE("unrelated key") {
    // Larger modulus so the value is in range and the check is a real one.
    auto other = generate_keypair(528, 77);
    CHECK_FALSE(verify_sig(msg, sig, other.pub));
  }

  SUBCASE("different message") { CHECK_FALSE(verify_sig(to_bytes("contract2"), sig, keys.a.pub)); }

  SUBCASE("single-bit mutations") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 64; ++i) {
      Signature bad = sig;
      mp_bitcnt_t bit = rng() % 511;
      mpz_combit(bad.value.get_mpz_t(), bit);
      if (bad.value >= keys.a.pub.n) continue;
      // The flipped value's e-th power differs from the hash.
      CHECK(mod_exp(bad.value, keys.a.pub.e, keys.a.pub.n) != hash(msg).to_int());
      CHECK_FALSE(verify_sig(msg, bad, keys.a.pub));
    }
  }

  SUBCASE("value at or above the modulus is malformed, not false") {
    Signature bad{keys.a.pub.n, 512};
    try {
      verify_sig(msg, bad, keys.a.pub);
      FAIL("expected malformed-signature");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::malformed_signature);
    }
  }
}

TEST_CASE("signing needs a modulus that holds a SHA-256 value") {
  auto toy = fairsign::testing::toy_key();
  try {
    sign(to_bytes("x"), toy.priv);
    FAIL("expected modulus-too-small");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::modulus_too_small);
  }
}

TEST_CASE("counter exactness per primitive") {
  const auto& k = fairsign::testing::keys_seed1().a;
  ExpCounter c;
  CountSlot s{&c, PartyId::A, Phase::exchange};
  auto ct = rsa_encrypt(42, k.pub, s);
  CHECK(c.total() == 1);
  rsa_decrypt(ct, k.priv, s);
  CHECK(c.total() == 2);
  auto sig = sign(to_bytes("m"), k.priv, s);
  CHECK(c.total() == 3);
  verify_sig(to_bytes("m"), sig, k.pub, s);
  CHECK(c.total() == 4);
  hash("m");
  CHECK(c.total() == 4);
  CHECK(c.get(PartyId::A, Phase::exchange) == 4);
  CHECK(c.phase_total(Phase::dispute) == 0);
  c.reset();
  CHECK(c.total() == 0);
}
