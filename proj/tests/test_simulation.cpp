#include <doctest.h>

#include <set>

#include "fairsign/simulation.hpp"
#include "support.hpp"

using namespace fairsign;

namespace {

ScenarioOutcome run(Strategy a, Strategy b, std::uint64_t seed = 1) {
  ScenarioConfig cfg;
  cfg.strategy_a = a;
  cfg.strategy_b = b;
  cfg.seed = seed;
  return run_scenario(cfg);
}

}  // namespace

TEST_CASE("honest exchange never reaches the TTP") {
  auto out = run(Strategy::HONEST, Strategy::HONEST);
  CHECK(out.a_has_valid_sig_b);
  CHECK(out.b_has_valid_sig_a);
  CHECK(transcript_types(out.transcript) ==
        std::vector<MsgType>{MsgType::em1, MsgType::em2, MsgType::em3});
  CHECK(out.ttp_messages_received == 0);
  CHECK(out.exp_counts.phase_total(Phase::exchange) == 6);
  CHECK(out.exp_counts.phase_total(Phase::dispute) == 0);
  CHECK(out.terminal_phases[PartyId::A] == "Em3Sent");
  CHECK(out.terminal_phases[PartyId::B] == "Done");
  CHECK(fairness_holds(out));
}

TEST_CASE("withheld E-M3 is recovered through the TTP") {
  auto out = run(Strategy::A_NO_EM3, Strategy::HONEST);
  CHECK(out.a_has_valid_sig_b);
  CHECK(out.b_has_valid_sig_a);
  CHECK(transcript_types(out.transcript) ==
        std::vector<MsgType>{MsgType::em1, MsgType::em2, MsgType::drm1, MsgType::drm2,
                             MsgType::drm3});
  CHECK(out.exp_counts.phase_total(Phase::dispute) == 7);
  // E-M1 build (1), B's certificate checks (2), B signs (1), A verifies E-M2 (1).
  CHECK(out.exp_counts.phase_total(Phase::exchange) == 5);
  // DR-M1 goes out when the 10-tick timer started at t=1 expires.
  CHECK(out.transcript[2].tick == 11);
}

TEST_CASE("bad ciphertext in E-M1: nobody reveals a signature") {
  auto out = run(Strategy::A_BAD_EM1_CIPHERTEXT, Strategy::HONEST);
  CHECK_FALSE(out.a_has_valid_sig_b);
  CHECK_FALSE(out.b_has_valid_sig_a);
  CHECK(transcript_types(out.transcript) == std::vector<MsgType>{MsgType::em1});
  CHECK(out.terminal_phases[PartyId::B] == "Aborted");
  CHECK(fairness_holds(out));
}

TEST_CASE("contract substitution leaves no signature on the substituted text") {
  auto out = run(Strategy::A_BAD_EM1_CONTRACT, Strategy::HONEST);
  CHECK_FALSE(out.b_held_sig);
  CHECK_FALSE(out.a_held_sig);
  CHECK(count_messages(out.transcript, {MsgType::em2}) == 0);
}

TEST_CASE("cheating responder cases") {
  SUBCASE("bad E-M2") {
    auto out = run(Strategy::HONEST, Strategy::B_BAD_EM2);
    CHECK_FALSE(out.a_has_valid_sig_b);
    CHECK_FALSE(out.b_has_valid_sig_a);
    CHECK(out.terminal_phases[PartyId::A] == "Aborted");
    CHECK(out.transcript.back().type == MsgType::dispute_rejected);
    CHECK(count_messages(out.transcript, {MsgType::em3}) == 0);
  }
  SUBCASE("early dispute") {
    auto out = run(Strategy::HONEST, Strategy::B_EARLY_DISPUTE);
    CHECK(out.a_has_valid_sig_b);
    CHECK(out.b_has_valid_sig_a);
    CHECK(count_messages(out.transcript, {MsgType::em2}) == 0);
    CHECK(count_messages(out.transcript, {MsgType::drm2}) == 1);
    CHECK(out.terminal_phases[PartyId::A] == "Resolved");
  }
  SUBCASE("both cheat: bad E-M3 against bad E-M2") {
    auto out = run(Strategy::A_BAD_EM3, Strategy::B_BAD_EM2);
    CHECK_FALSE(out.a_has_valid_sig_b);
    CHECK_FALSE(out.b_has_valid_sig_a);
    CHECK(out.terminal_phases[PartyId::A] == "Aborted");
    CHECK(out.terminal_phases[PartyId::TTP] == "Rejected");
  }
}

TEST_CASE("fairness predicate") {
  ScenarioOutcome o;
  o.a_has_valid_sig_b = o.b_has_valid_sig_a = true;
  CHECK(fairness_holds(o));
  o.a_has_valid_sig_b = o.b_has_valid_sig_a = false;
  CHECK(fairness_holds(o));
  o.a_has_valid_sig_b = true;
  CHECK_FALSE(fairness_holds(o));
}

TEST_CASE("strategy matrix") {
  auto report = run_all_cases(ScenarioConfig{});
  CHECK(report.results.size() == 18);
  CHECK(report.ok());
  for (const auto& r : report.results) {
    CAPTURE(strategy_name(r.a));
    CAPTURE(strategy_name(r.b));
    CHECK(r.fair);
    CHECK(r.shape_matches);
    CHECK(r.outcome.messages_sent == r.outcome.messages_delivered);
  }

  SUBCASE("negative control: a TTP that drops DR-M2 is caught") {
    ScenarioConfig broken;
    broken.broken_ttp = true;
    auto bad = run_cases(broken, {Strategy::HONEST}, {Strategy::B_EARLY_DISPUTE});
    CHECK_FALSE(bad.ok());
    CHECK(bad.violations.front().find("HONEST x B_EARLY_DISPUTE") != std::string::npos);
  }

  SUBCASE("empty matrix") {
    CHECK_THROWS_AS(run_cases(ScenarioConfig{}, {}, {Strategy::HONEST}), Error);
  }
}

TEST_CASE("determinism") {
  ScenarioConfig cfg;
  cfg.strategy_a = Strategy::A_BAD_EM1_CIPHERTEXT;
  auto a = run_scenario(cfg);
  auto b = run_scenario(cfg);
  CHECK(outcome_record(cfg, a).dump() == outcome_record(cfg, b).dump());
  for (std::size_t i = 0; i < a.transcript.size(); ++i) CHECK(a.transcript[i].wire == b.transcript[i].wire);

  ScenarioConfig other = cfg;
  other.seed = 2;
  CHECK(outcome_record(cfg, a).dump() != outcome_record(other, run_scenario(other)).dump());
}

TEST_CASE("livelock guard") {
  ScenarioConfig cfg;
  cfg.strategy_a = Strategy::A_NO_EM3;
  cfg.max_ticks = 5;
  try {
    run_scenario(cfg);
    FAIL("expected livelock");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::livelock);
  }
}

TEST_CASE("transport delivers in order, once, one tick later") {
  Transport t;
  t.send(PartyId::A, PartyId::B, MsgEM2{Signature{1, 8}});
  t.send(PartyId::A, PartyId::B, MsgEM3{Signature{2, 8}});
  CHECK(t.take_deliverable(PartyId::B).empty());
  t.advance();
  auto got = t.take_deliverable(PartyId::B);
  REQUIRE(got.size() == 2);
  CHECK(std::holds_alternative<MsgEM2>(got[0].msg));
  CHECK(std::holds_alternative<MsgEM3>(got[1].msg));
  CHECK(t.take_deliverable(PartyId::B).empty());
  CHECK(t.idle());
  CHECK(t.sent() == t.delivered());
}

TEST_CASE("strategy names and applicability") {
  CHECK(parse_strategy("A_NO_EM3") == Strategy::A_NO_EM3);
  CHECK_FALSE(parse_strategy("BOGUS"));
  CHECK(strategy_applies_to(Strategy::HONEST, PartyId::B));
  CHECK_FALSE(strategy_applies_to(Strategy::B_BAD_EM2, PartyId::A));
  CHECK(strategies_for(PartyId::A).size() == 6);
  CHECK(strategies_for(PartyId::B).size() == 3);
  ScenarioConfig cfg;
  cfg.strategy_a = Strategy::B_EARLY_DISPUTE;
  CHECK_THROWS_AS(run_scenario(cfg), Error);
}

TEST_CASE("scenario config files") {
  auto cfg = load_scenario_config(
      "# dispute scenario\n"
      "strategy_a = A_NO_EM3\n"
      "strategy_b=HONEST\n"
      "seed=7\n"
      "key_bits=384\n"
      "timeout_ticks=3   # short\n"
      "dispute_check=hash_compare\n");
  CHECK(cfg.strategy_a == Strategy::A_NO_EM3);
  CHECK(cfg.seed == 7);
  CHECK(cfg.key_bits == 384);
  CHECK(cfg.timeout_ticks == 3);
  CHECK(cfg.dispute_check == DisputeCheck::hash_compare);
  auto out = run_scenario(cfg);
  CHECK(fairness_holds(out));
  CHECK(out.transcript[2].tick == 4);

  CHECK_THROWS_AS(load_scenario_config("color=blue\n"), Error);
  CHECK_THROWS_AS(load_scenario_config("strategy_a=B_BAD_EM2\n"), Error);
  CHECK_THROWS_AS(load_scenario_config("seed=abc\n"), Error);
  CHECK_THROWS_AS(load_scenario_config("seed\n"), Error);
}

TEST_CASE("metrics report") {
  auto honest = run(Strategy::HONEST, Strategy::HONEST);
  auto dispute = run(Strategy::A_NO_EM3, Strategy::HONEST);

  auto report = metrics_report(honest, &dispute);
  CHECK(report.all_match());
  REQUIRE(report.cells.size() == 4);
  CHECK(report.cells[0].name == "messages-exchange");
  CHECK(*report.cells[1].measured == 3);
  CHECK(*report.cells[3].measured == 7);
  CHECK(report.render().find("TTP=5") != std::string::npos);

  SUBCASE("honest runs only") {
    auto partial = metrics_report(honest, nullptr);
    CHECK_FALSE(partial.cells[1].measured);
    CHECK(partial.render().find("not-measured") != std::string::npos);
  }

  SUBCASE("hash-compare TTP counts 6 and is flagged") {
    ScenarioConfig cfg;
    cfg.strategy_a = Strategy::A_NO_EM3;
    cfg.dispute_check = DisputeCheck::hash_compare;
    auto alt = run_scenario(cfg);
    auto r = metrics_report(honest, &alt);
    CHECK(*r.cells[3].measured == 6);
    CHECK_FALSE(r.cells[3].matches());
    CHECK(r.render().find("MISMATCH") != std::string::npos);
    CHECK(r.render().find("deviates from the default counting model") != std::string::npos);
  }
}

TEST_CASE("fairness holds across seeds") {
  for (std::uint64_t seed : {2, 3, 4}) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.key_bits = 384;
    CHECK(run_all_cases(cfg).ok());
  }
}
