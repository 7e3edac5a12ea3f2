// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any of them fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "process.hpp"
#include "support.hpp"

using namespace fairsign;
using fairsign::testing::naive_mod_exp;
using fairsign::testing::random_below;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ScenarioOutcome run(Strategy a, Strategy b = Strategy::HONEST, std::uint64_t seed = 1) {
  ScenarioConfig cfg;
  cfg.strategy_a = a;
  cfg.strategy_b = b;
  cfg.seed = seed;
  return run_scenario(cfg);
}

std::size_t dispute_segment(const Transcript& t) {
  return count_messages(t, {MsgType::drm1, MsgType::drm2, MsgType::drm3, MsgType::dispute_rejected});
}

Result message_counts() {
  auto start = Clock::now();
  auto honest = run(Strategy::HONEST);
  auto dispute = run(Strategy::A_NO_EM3);
  double secs = seconds_since(start);
  std::size_t ex = honest.transcript.size();
  std::size_t dr = dispute_segment(dispute.transcript);
  auto types = transcript_types(dispute.transcript);
  bool tail_ok = types.size() == 5 && types[2] == MsgType::drm1 && types[3] == MsgType::drm2 &&
                 types[4] == MsgType::drm3;
  std::ostringstream d;
  d << "exchange=" << ex << " dispute=" << dr << " elapsed=" << secs << "s";
  return {ex == 3 && dr == 3 && tail_ok && secs < 1.0, d.str()};
}

Result exponentiation_counts() {
  auto honest = run(Strategy::HONEST);
  auto dispute = run(Strategy::A_NO_EM3);
  auto ex = honest.exp_counts.phase_total(Phase::exchange);
  auto dr = dispute.exp_counts.phase_total(Phase::dispute);
  auto report = metrics_report(honest, &dispute);
  std::cout << report.render();
  std::ostringstream d;
  d << "exchange=" << ex << " dispute=" << dr;
  return {ex == 6 && dr == 7 && report.all_match(), d.str()};
}

Result fairness_matrix() {
  auto start = Clock::now();
  auto report = run_all_cases(ScenarioConfig{});
  double secs = seconds_since(start);
  Result r;
  std::size_t shapes = 0;
  for (const auto& c : report.results) {
    const auto& o = c.outcome;
    bool ok = c.fair && c.shape_matches;
    // Independent restatement of the per-case expectations.
    bool a_bad_em1 = c.a == Strategy::A_BAD_EM1_CERT || c.a == Strategy::A_BAD_EM1_CONTRACT ||
                     c.a == Strategy::A_BAD_EM1_CIPHERTEXT;
    bool both = o.a_has_valid_sig_b && o.b_has_valid_sig_a;
    bool neither = !o.a_has_valid_sig_b && !o.b_has_valid_sig_a;
    if (a_bad_em1) {
      ok = ok && neither && count_messages(o.transcript, {MsgType::em2}) == 0 && !o.b_held_sig;
    } else if (c.b == Strategy::B_EARLY_DISPUTE) {
      ok = ok && both && count_messages(o.transcript, {MsgType::drm2}) == 1 &&
           count_messages(o.transcript, {MsgType::drm3}) == 1;
    } else if (c.b == Strategy::B_BAD_EM2) {
      ok = ok && neither;
    } else if (c.a == Strategy::HONEST) {
      ok = ok && both && o.ttp_messages_received == 0;
    } else {
      ok = ok && both && count_messages(o.transcript, {MsgType::drm3}) == 1;
    }
    if (ok) ++shapes;
    else {
      r.pass = false;
      std::cout << "  unexpected: " << strategy_name(c.a) << " x " << strategy_name(c.b) << "\n";
    }
  }
  std::ostringstream d;
  d << "scenarios=" << report.results.size() << " shapes_ok=" << shapes
    << " violations=" << report.violations.size() << " elapsed=" << secs << "s";
  r.pass = r.pass && report.ok() && report.results.size() == 18 && secs < 30.0;
  r.detail = d.str();
  return r;
}

Result crypto_properties() {
  std::mt19937_64 rng(20261019);
  std::size_t round_trips = 0, failures = 0;

  for (int k = 0; k < 10; ++k) {
    auto keys = generate_keypair(512, 1000 + k);
    for (int i = 0; i < 100; ++i) {
      BigInt m = random_below(rng, keys.pub.n);
      if (rsa_decrypt(rsa_encrypt(m, keys.pub), keys.priv) != m) ++failures;
      Bytes msg(1 + rng() % 200);
      for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
      auto sig = sign(msg, keys.priv);
      if (!verify_sig(msg, sig, keys.pub)) ++failures;
      msg[rng() % msg.size()] ^= 0x01;
      if (verify_sig(msg, sig, keys.pub)) ++failures;
      ++round_trips;
    }
  }

  std::size_t oracle_checks = 0, oracle_failures = 0;
  for (std::uint64_t m = 2; m < 1000; ++m) {
    for (std::uint64_t b = 0; b < m; ++b) {
      std::uint64_t acc = 1 % m;
      for (std::uint64_t e = 0; e < 50; ++e) {
        if (mod_exp(BigInt(static_cast<unsigned long>(b)), BigInt(static_cast<unsigned long>(e)),
                    BigInt(static_cast<unsigned long>(m))) != static_cast<unsigned long>(acc))
          ++oracle_failures;
        acc = acc * b % m;
        ++oracle_checks;
      }
    }
  }
  // Spot-check the incremental oracle against the naive one.
  if (naive_mod_exp(123, 49, 997) != mod_exp(123, 49, 997)) ++oracle_failures;

  const auto& keys = fairsign::testing::keys_seed1();
  auto shared = generate_keypair(528, 77);
  auto c_at = issue_shared_key_cert(keys.ttp, keys.a.pub, shared.pub, 1);
  auto contract = Contract::from_text("Sale of 100 units at 25.00 each, delivery within 30 days.");
  ExpCounter counter;
  CertificateAuthority ca(keys.ca, keys.ttp.pub, &counter);
  auto grant = ca.issue_contract_cert(
      ContractCertRequest{sign(contract.body(), keys.a.priv), contract, c_at}, keys.a.pub);

  auto tamper = [&](Bytes wire, const std::function<bool(ByteView)>& verify) {
    std::size_t accepted = 0;
    if (!verify(wire)) return std::size_t{1000};  // the untouched certificate must verify
    for (int i = 0; i < 100; ++i) {
      std::size_t bit = rng() % (wire.size() * 8);
      Bytes copy = wire;
      copy[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      bool ok = false;
      try {
        ok = verify(copy);
      } catch (const Error&) {
        ok = false;
      }
      if (ok) ++accepted;
    }
    return accepted;
  };
  auto at_accepted = tamper(c_at.serialize(), [&](ByteView w) {
    return verify_shared_key_cert(w, keys.ttp.pub);
  });
  auto cc_accepted = tamper(grant.cert.serialize(), [&](ByteView w) {
    return verify_contract_cert(w, keys.ca.pub);
  });

  std::ostringstream d;
  d << "round_trips=" << round_trips << " failures=" << failures << " mod_exp_cases=" << oracle_checks
    << " mismatches=" << oracle_failures << " tampered_accepted=" << at_accepted << "/" << cc_accepted;
  return {round_trips == 1000 && failures == 0 && oracle_failures == 0 && at_accepted == 0 &&
              cc_accepted == 0,
          d.str()};
}

Result determinism() {
  auto dir = testproc::scratch_dir("determinism");
  auto first = testproc::run_cli({"matrix", "--seed", "1", "--records"}, dir);
  auto second = testproc::run_cli({"matrix", "--seed", "1", "--records"}, dir);
  auto lines = std::count(first.output.begin(), first.output.end(), '\n');
  std::ostringstream d;
  d << "records=" << lines << " octets=" << first.output.size()
    << " identical=" << (first.output == second.output ? "yes" : "no");
  return {first.status == 0 && second.status == 0 && static_cast<std::size_t>(lines) == 19 && first.output == second.output,
          d.str()};
}

Result he_sig_binding() {
  std::size_t matches = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto keys = derive_keys(seed, 512);
    auto keyring = keys.keyring();
    TrustedParty::Options opt;
    opt.shared_key_seed = shared_key_seed(seed);
    TrustedParty ttp(keys.ttp, keyring, nullptr, opt);
    CertificateAuthority ca(keys.ca, keys.ttp.pub, nullptr);
    Initiator a(keys.a, keyring);
    auto contract = Contract::from_text("Registration " + std::to_string(seed) + ": 40 crates of tea.");
    auto reg = a.register_with(contract, ttp, ca);
    auto local = a.encrypt_own_signature();
    // Recompute the ciphertext from scratch as well, without the initiator.
    auto sig = sign(contract.body(), keys.a.priv);
    EncryptedSignature manual{mod_exp(sig.value, reg.c_at.shared_pk.e, reg.c_at.shared_pk.n)};
    if (encrypted_signature_digest(local) == reg.c_cert.he_sig &&
        encrypted_signature_digest(manual) == reg.c_cert.he_sig)
      ++matches;
  }
  std::ostringstream d;
  d << "matches=" << matches << "/50";
  return {matches == 50, d.str()};
}

Result multi_process() {
  auto start = Clock::now();
  auto honest = testproc::run_network(1, false, "accept-honest");
  auto killed = testproc::run_network(1, true, "accept-killed");

  auto in_process = [](Strategy a) {
    std::map<std::string, std::string> hex;
    for (const auto& e : run(a).transcript) hex.emplace(std::string(msg_type_name(e.type)), to_hex(e.wire));
    return hex;
  };
  auto expect_honest = in_process(Strategy::HONEST);
  auto expect_killed = in_process(Strategy::A_NO_EM3);

  bool honest_ok = honest.completed && honest.a_holds_sig_b && honest.b_holds_sig_a;
  for (const auto& [type, hex] : expect_honest) honest_ok = honest_ok && honest.sent_hex[type] == hex;
  honest_ok = honest_ok && !honest.sent_hex.count("DRM1");

  bool killed_ok = killed.completed && killed.a_was_killed && killed.b_holds_sig_a;
  for (const auto& [type, hex] : expect_killed) {
    // DR-M2 is addressed to the dead initiator; the TTP still sends it.
    killed_ok = killed_ok && killed.sent_hex[type] == hex;
  }

  std::ostringstream d;
  d << "honest=" << (honest_ok ? "ok" : "FAILED " + honest.failure)
    << " killed_initiator=" << (killed_ok ? "ok" : "FAILED " + killed.failure)
    << " elapsed=" << seconds_since(start) << "s";
  return {honest_ok && killed_ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"1 message counts 3/3", message_counts},
      {"2 exponentiation counts 6/7", exponentiation_counts},
      {"3 fairness matrix", fairness_matrix},
      {"4 crypto properties", crypto_properties},
      {"5 determinism", determinism},
      {"6 he_sig binding", he_sig_binding},
      {"7 multi-process smoke", multi_process},
  };
  int failed = 0;
  std::vector<std::string> lines;
  for (const auto& [name, check] : criteria) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    lines.push_back((r.pass ? "PASS  " : "FAIL  ") + name + "  (" + r.detail + ")");
    std::cout << lines.back() << std::endl;
  }
  std::cout << "\nsummary\n";
  for (const auto& l : lines) std::cout << l << "\n";
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
