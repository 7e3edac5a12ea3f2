#pragma once

// Deterministic in-process simulation of the exchange and dispute protocols
// over resilient channels, with pluggable deviating strategies for P_a and
// P_b and a fairness evaluator.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fairsign/roles.hpp"

namespace fairsign {

enum class Strategy {
  HONEST,
  A_BAD_EM1_CERT,
  A_BAD_EM1_CONTRACT,
  A_BAD_EM1_CIPHERTEXT,
  A_NO_EM3,
  A_BAD_EM3,
  B_BAD_EM2,
  B_EARLY_DISPUTE,
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);
// HONEST applies to both parties.
bool strategy_applies_to(Strategy s, PartyId party);
const std::vector<Strategy>& strategies_for(PartyId party);

struct ScenarioConfig {
  Strategy strategy_a = Strategy::HONEST;
  Strategy strategy_b = Strategy::HONEST;
  std::uint64_t seed = 1;
  std::size_t key_bits = 512;
  std::size_t shared_extra_bits = 16;
  std::uint32_t timeout_ticks = 10;
  std::uint32_t max_ticks = 1000;
  DisputeCheck dispute_check = DisputeCheck::decrypt_verify;
  // Negative control: a TTP that answers the responder but never sends DR-M2.
  bool broken_ttp = false;
  std::string contract_text = "Sale of 100 units at 25.00 each, delivery within 30 days.";
};

// key=value lines: strategy_a, strategy_b, seed, key_bits, timeout_ticks,
// dispute_check. '#' starts a comment.
ScenarioConfig load_scenario_config(std::string_view text, ScenarioConfig base = {});

// Seeds for per-role key generation, shared with the multi-process mode so
// both produce identical key material for the same scenario seed.
std::uint64_t role_key_seed(std::uint64_t seed, PartyId role);
std::uint64_t shared_key_seed(std::uint64_t seed);

struct ScenarioKeys {
  RsaKeyPair a, b, ttp, ca;
  Keyring keyring() const;
};
ScenarioKeys derive_keys(std::uint64_t seed, std::size_t bits);

struct TranscriptEntry {
  std::uint64_t tick = 0;
  PartyId from = PartyId::A;
  PartyId to = PartyId::B;
  MsgType type = MsgType::em1;
  Bytes wire;
};

using Transcript = std::vector<TranscriptEntry>;

// Per-recipient FIFO queues with a one-tick delivery delay. Every enqueued
// message is delivered exactly once.
class Transport {
 public:
  struct Envelope {
    PartyId from;
    PartyId to;
    ProtocolMessage msg;
    std::uint64_t sent_tick;
  };

  void send(PartyId from, PartyId to, ProtocolMessage msg);
  // Pops the messages for `to` that were sent before the current tick.
  std::vector<Envelope> take_deliverable(PartyId to);
  void advance() { ++tick_; }
  std::uint64_t tick() const { return tick_; }
  bool idle() const;
  std::uint64_t sent() const { return sent_; }
  std::uint64_t delivered() const { return delivered_; }
  const Transcript& transcript() const { return transcript_; }

 private:
  std::map<PartyId, std::deque<Envelope>> queues_;
  Transcript transcript_;
  std::uint64_t tick_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
};

struct ScenarioOutcome {
  bool a_has_valid_sig_b = false;
  bool b_has_valid_sig_a = false;
  std::optional<Signature> a_held_sig;
  std::optional<Signature> b_held_sig;
  Transcript transcript;
  ExpCounter exp_counts;
  std::map<PartyId, std::string> terminal_phases;
  std::uint64_t ttp_messages_received = 0;
  std::uint64_t final_tick = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_delivered = 0;
  Contract contract = Contract::from_text("-");
};

ScenarioOutcome run_scenario(const ScenarioConfig& config);

bool fairness_holds(const ScenarioOutcome& outcome);

std::size_t count_messages(const Transcript& t, std::initializer_list<MsgType> types);
std::vector<MsgType> transcript_types(const Transcript& t);

struct ExpectedShape {
  bool a_has_sig_b;
  bool b_has_sig_a;
  bool ttp_contacted;
};
ExpectedShape expected_shape(Strategy a, Strategy b);

struct ScenarioResult {
  Strategy a;
  Strategy b;
  ScenarioOutcome outcome;
  bool fair = false;
  bool shape_matches = false;
};

struct MatrixReport {
  std::vector<ScenarioResult> results;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Every applicable (A strategy, B strategy) pair.
MatrixReport run_all_cases(const ScenarioConfig& base);
MatrixReport run_cases(const ScenarioConfig& base, const std::vector<Strategy>& a_strategies,
                       const std::vector<Strategy>& b_strategies);

struct MetricCell {
  std::string name;
  std::uint64_t published = 0;
  std::optional<std::uint64_t> measured;
  bool matches() const { return measured && *measured == published; }
};

struct MetricsReport {
  std::vector<MetricCell> cells;
  std::vector<std::string> itemization;
  bool all_match() const;
  std::string render() const;
  nlohmann::json to_json() const;
};

// `dispute` may be null when only honest runs were made.
MetricsReport metrics_report(const ScenarioOutcome& honest, const ScenarioOutcome* dispute);

nlohmann::json outcome_record(const ScenarioConfig& config, const ScenarioOutcome& outcome);
std::string render_outcome(const ScenarioConfig& config, const ScenarioOutcome& outcome);

}  // namespace fairsign
