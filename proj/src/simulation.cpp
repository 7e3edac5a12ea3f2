#include "fairsign/simulation.hpp"

#include <charconv>
#include <memory>
#include <random>
#include <sstream>

namespace fairsign {

namespace {

constexpr Strategy kAllStrategies[] = {
    Strategy::HONEST,   Strategy::A_BAD_EM1_CERT, Strategy::A_BAD_EM1_CONTRACT,
    Strategy::A_BAD_EM1_CIPHERTEXT, Strategy::A_NO_EM3, Strategy::A_BAD_EM3,
    Strategy::B_BAD_EM2, Strategy::B_EARLY_DISPUTE,
};

constexpr PartyId kSchedule[] = {PartyId::A, PartyId::B, PartyId::TTP};

}  // namespace

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::HONEST: return "HONEST";
    case Strategy::A_BAD_EM1_CERT: return "A_BAD_EM1_CERT";
    case Strategy::A_BAD_EM1_CONTRACT: return "A_BAD_EM1_CONTRACT";
    case Strategy::A_BAD_EM1_CIPHERTEXT: return "A_BAD_EM1_CIPHERTEXT";
    case Strategy::A_NO_EM3: return "A_NO_EM3";
    case Strategy::A_BAD_EM3: return "A_BAD_EM3";
    case Strategy::B_BAD_EM2: return "B_BAD_EM2";
    case Strategy::B_EARLY_DISPUTE: return "B_EARLY_DISPUTE";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies)
    if (strategy_name(s) == name) return s;
  return std::nullopt;
}

bool strategy_applies_to(Strategy s, PartyId party) {
  if (s == Strategy::HONEST) return party == PartyId::A || party == PartyId::B;
  if (s == Strategy::B_BAD_EM2 || s == Strategy::B_EARLY_DISPUTE) return party == PartyId::B;
  return party == PartyId::A;
}

const std::vector<Strategy>& strategies_for(PartyId party) {
  static const std::vector<Strategy> a = [] {
    std::vector<Strategy> out;
    for (auto s : kAllStrategies)
      if (strategy_applies_to(s, PartyId::A)) out.push_back(s);
    return out;
  }();
  static const std::vector<Strategy> b = [] {
    std::vector<Strategy> out;
    for (auto s : kAllStrategies)
      if (strategy_applies_to(s, PartyId::B)) out.push_back(s);
    return out;
  }();
  static const std::vector<Strategy> none;
  if (party == PartyId::A) return a;
  if (party == PartyId::B) return b;
  return none;
}

// ---- config ----

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error(Errc::usage, "invalid integer for " + std::string(key) + ": " + std::string(value));
  return out;
}

}  // namespace

ScenarioConfig load_scenario_config(std::string_view text, ScenarioConfig base) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash_pos = line.find('#'); hash_pos != std::string_view::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::usage, "line " + std::to_string(line_no) + ": expected key=value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "strategy_a" || key == "strategy_b") {
      auto s = parse_strategy(value);
      auto party = key == "strategy_a" ? PartyId::A : PartyId::B;
      if (!s || !strategy_applies_to(*s, party))
        throw Error(Errc::usage, "invalid " + std::string(key) + ": " + std::string(value));
      (party == PartyId::A ? base.strategy_a : base.strategy_b) = *s;
    } else if (key == "seed") {
      base.seed = parse_uint(key, value);
    } else if (key == "key_bits") {
      base.key_bits = parse_uint(key, value);
    } else if (key == "timeout_ticks") {
      base.timeout_ticks = static_cast<std::uint32_t>(parse_uint(key, value));
    } else if (key == "dispute_check") {
      if (value == "decrypt_verify") base.dispute_check = DisputeCheck::decrypt_verify;
      else if (value == "hash_compare") base.dispute_check = DisputeCheck::hash_compare;
      else throw Error(Errc::usage, "invalid dispute_check: " + std::string(value));
    } else {
      throw Error(Errc::usage, "unknown config key: " + std::string(key));
    }
  }
  return base;
}

// ---- keys ----

std::uint64_t role_key_seed(std::uint64_t seed, PartyId role) {
  return seed * 16 + static_cast<std::uint64_t>(role);
}

std::uint64_t shared_key_seed(std::uint64_t seed) { return seed * 16 + 5; }

Keyring ScenarioKeys::keyring() const {
  Keyring k;
  k.add(PartyId::A, a.pub);
  k.add(PartyId::B, b.pub);
  k.add(PartyId::TTP, ttp.pub);
  k.add(PartyId::CA, ca.pub);
  return k;
}

ScenarioKeys derive_keys(std::uint64_t seed, std::size_t bits) {
  return ScenarioKeys{generate_keypair(bits, role_key_seed(seed, PartyId::A)),
                      generate_keypair(bits, role_key_seed(seed, PartyId::B)),
                      generate_keypair(bits, role_key_seed(seed, PartyId::TTP)),
                      generate_keypair(bits, role_key_seed(seed, PartyId::CA))};
}

// ---- transport ----

void Transport::send(PartyId from, PartyId to, ProtocolMessage msg) {
  transcript_.push_back(TranscriptEntry{tick_, from, to, message_type(msg), encode_message(msg)});
  queues_[to].push_back(Envelope{from, to, std::move(msg), tick_});
  ++sent_;
}

std::vector<Transport::Envelope> Transport::take_deliverable(PartyId to) {
  std::vector<Envelope> out;
  auto& q = queues_[to];
  while (!q.empty() && q.front().sent_tick < tick_) {
    out.push_back(std::move(q.front()));
    q.pop_front();
    ++delivered_;
  }
  return out;
}

bool Transport::idle() const {
  for (const auto& [party, q] : queues_)
    if (!q.empty()) return false;
  return true;
}

// ---- agents ----

namespace {

class Agent {
 public:
  virtual ~Agent() = default;
  virtual void start(Transport&) {}
  virtual void on_message(const Transport::Envelope& env, Transport& net) = 0;
  virtual void on_tick(Transport&) {}
  virtual bool timer_pending() const { return false; }
  virtual std::optional<Signature> held_counterpart_sig() const { return std::nullopt; }
  virtual std::string phase() const = 0;
};

// P_a. Deviations are applied to the honest machine's output.
class InitiatorAgent : public Agent {
 public:
  InitiatorAgent(Initiator& machine, Strategy strategy, std::uint64_t seed, ExpCounter* counter)
      : m_(machine), strategy_(strategy), rng_(seed), counter_(counter) {}

  void start(Transport& net) override {
    MsgEM1 em1 = m_.build_em1();
    switch (strategy_) {
      case Strategy::A_BAD_EM1_CERT:
        em1.c_cert.issuer_sig.value ^= 1;
        break;
      case Strategy::A_BAD_EM1_CONTRACT: {
        Bytes body = em1.contract.body();
        const std::string_view extra = " Price revised to 50.00 each.";
        body.insert(body.end(), extra.begin(), extra.end());
        em1.contract = Contract(std::move(body));
        break;
      }
      case Strategy::A_BAD_EM1_CIPHERTEXT: {
        // Encrypt a garbage value instead of the signature.
        const auto& shared = em1.c_at.shared_pk;
        BigInt garbage = BigInt(std::to_string(rng_())) % m_.keys().pub.n;
        em1.enc_sig_a.value = rsa_encrypt(garbage, shared, {counter_, PartyId::A, Phase::exchange});
        break;
      }
      default:
        break;
    }
    net.send(PartyId::A, PartyId::B, std::move(em1));
  }

  void on_message(const Transport::Envelope& env, Transport& net) override {
    if (const auto* em2 = std::get_if<MsgEM2>(&env.msg)) {
      if (m_.phase() != PartyPhase::Em1Sent) return;
      if (!m_.verify_em2(*em2)) return;  // silent abort
      if (strategy_ == Strategy::A_NO_EM3) return;
      MsgEM3 em3 = m_.build_em3();
      if (strategy_ == Strategy::A_BAD_EM3) em3.sig_a.value ^= 1;
      net.send(PartyId::A, PartyId::B, std::move(em3));
    } else if (const auto* drm2 = std::get_if<MsgDRM2>(&env.msg)) {
      m_.apply_drm2(*drm2);
    }
  }

  std::optional<Signature> held_counterpart_sig() const override { return m_.counterpart_sig(); }
  std::string phase() const override { return std::string(party_phase_name(m_.phase())); }

 private:
  Initiator& m_;
  Strategy strategy_;
  std::mt19937_64 rng_;
  ExpCounter* counter_;
};

class HonestResponderAgent : public Agent {
 public:
  HonestResponderAgent(Responder& machine, std::uint32_t timeout_ticks)
      : m_(machine), timeout_(timeout_ticks) {}

  void on_message(const Transport::Envelope& env, Transport& net) override {
    if (const auto* em1 = std::get_if<MsgEM1>(&env.msg)) {
      if (m_.phase() != PartyPhase::Init) return;
      if (!m_.verify_em1(*em1).accepted) return;
      net.send(PartyId::B, PartyId::A, m_.build_em2());
      deadline_ = net.tick() + timeout_;
    } else if (const auto* em3 = std::get_if<MsgEM3>(&env.msg)) {
      if (m_.phase() != PartyPhase::Em2Sent) return;
      if (!m_.verify_em3(*em3).accepted) net.send(PartyId::B, PartyId::TTP, m_.build_drm1());
    } else if (const auto* drm3 = std::get_if<MsgDRM3>(&env.msg)) {
      m_.apply_drm3(*drm3);
    } else if (const auto* rej = std::get_if<MsgDisputeRejected>(&env.msg)) {
      m_.apply_rejection(*rej);
    }
  }

  void on_tick(Transport& net) override {
    if (m_.phase() == PartyPhase::Em2Sent && net.tick() >= deadline_) {
      m_.on_timeout();
      net.send(PartyId::B, PartyId::TTP, m_.build_drm1());
    }
  }

  bool timer_pending() const override { return m_.phase() == PartyPhase::Em2Sent; }
  std::optional<Signature> held_counterpart_sig() const override { return m_.counterpart_sig(); }
  std::string phase() const override { return std::string(party_phase_name(m_.phase())); }

 private:
  Responder& m_;
  std::uint32_t timeout_;
  std::uint64_t deadline_ = 0;
};

// P_b deviations. E-M1 is still checked with the honest machine (a cheating
// responder gains nothing from accepting a bad E-M1); everything after that
// is driven here, from the key material P_b legitimately owns.
class DeviatingResponderAgent : public Agent {
 public:
  DeviatingResponderAgent(Responder& machine, Strategy strategy, const Keyring& keyring,
                          std::uint32_t timeout_ticks, ExpCounter* counter)
      : m_(machine), strategy_(strategy), keyring_(keyring), timeout_(timeout_ticks),
        counter_(counter) {}

  void on_message(const Transport::Envelope& env, Transport& net) override {
    if (const auto* em1 = std::get_if<MsgEM1>(&env.msg)) {
      if (m_.phase() != PartyPhase::Init) return;
      if (!m_.verify_em1(*em1).accepted) {
        state_ = "Aborted";
        return;
      }
      if (strategy_ == Strategy::B_EARLY_DISPUTE) {
        // Contact P_t before sending E-M2.
        sig_b_ = sign(m_.agreed_contract().body(), m_.keys().priv,
                      {counter_, PartyId::B, Phase::dispute});
        net.send(PartyId::B, PartyId::TTP, drm1());
        state_ = "DisputePending";
      } else {
        Bytes other = m_.agreed_contract().body();
        other.push_back('#');
        sig_b_ = sign(other, m_.keys().priv, {counter_, PartyId::B, Phase::exchange});
        net.send(PartyId::B, PartyId::A, MsgEM2{*sig_b_});
        deadline_ = net.tick() + timeout_;
        state_ = "Em2Sent";
      }
    } else if (const auto* em3 = std::get_if<MsgEM3>(&env.msg)) {
      if (state_ != "Em2Sent") return;
      if (check(em3->sig_a, Phase::exchange)) {
        held_ = em3->sig_a;
        state_ = "Done";
      } else {
        net.send(PartyId::B, PartyId::TTP, drm1());
        state_ = "DisputePending";
      }
    } else if (const auto* drm3 = std::get_if<MsgDRM3>(&env.msg)) {
      if (!check(drm3->sig_a, Phase::dispute))
        throw Error(Errc::trusted_party_violation, "DR-M3 carries an invalid initiator signature");
      held_ = drm3->sig_a;
      state_ = "Resolved";
    } else if (std::holds_alternative<MsgDisputeRejected>(env.msg)) {
      state_ = "Aborted";
    }
  }

  void on_tick(Transport& net) override {
    if (state_ == "Em2Sent" && net.tick() >= deadline_) {
      net.send(PartyId::B, PartyId::TTP, drm1());
      state_ = "DisputePending";
    }
  }

  bool timer_pending() const override { return state_ == "Em2Sent"; }
  std::optional<Signature> held_counterpart_sig() const override { return held_; }
  std::string phase() const override { return state_; }

 private:
  bool check(const Signature& sig, Phase phase) const {
    return signature_matches(m_.held_em1()->c_cert.h_c, sig, keyring_.at(PartyId::A),
                             {counter_, PartyId::B, phase});
  }

  MsgDRM1 drm1() const {
    const auto& em1 = *m_.held_em1();
    return MsgDRM1{em1.contract, em1.c_at, em1.c_cert, em1.enc_sig_a, *sig_b_};
  }

  Responder& m_;
  Strategy strategy_;
  const Keyring& keyring_;
  std::uint32_t timeout_;
  ExpCounter* counter_;
  std::string state_ = "Init";
  std::optional<Signature> sig_b_;
  std::optional<Signature> held_;
  std::uint64_t deadline_ = 0;
};

class TtpAgent : public Agent {
 public:
  TtpAgent(TrustedParty& ttp, bool broken) : ttp_(ttp), broken_(broken) {}

  void on_message(const Transport::Envelope& env, Transport& net) override {
    const auto* drm1 = std::get_if<MsgDRM1>(&env.msg);
    if (!drm1) return;
    auto outcome = ttp_.resolve(*drm1);
    if (auto* res = std::get_if<Resolution>(&outcome)) {
      if (!broken_) net.send(PartyId::TTP, PartyId::A, res->to_initiator);
      net.send(PartyId::TTP, PartyId::B, res->to_responder);
      last_ = "Resolved";
    } else {
      net.send(PartyId::TTP, env.from, std::get<MsgDisputeRejected>(outcome));
      last_ = "Rejected";
    }
  }

  std::string phase() const override { return last_; }

 private:
  TrustedParty& ttp_;
  bool broken_;
  std::string last_ = "Idle";
};

bool holds_valid(const std::optional<Signature>& sig, const Contract& contract,
                 const RsaPublicKey& signer) {
  if (!sig || sig->value < 0 || sig->value >= signer.n) return false;
  return verify_sig(contract.body(), *sig, signer);
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
  if (!strategy_applies_to(config.strategy_a, PartyId::A) ||
      !strategy_applies_to(config.strategy_b, PartyId::B))
    throw Error(Errc::usage, "strategy does not apply to that party");

  ExpCounter counter;
  const ScenarioKeys keys = derive_keys(config.seed, config.key_bits);
  const Keyring keyring = keys.keyring();
  const Contract contract = Contract::from_text(config.contract_text);

  TrustedParty::Options ttp_options;
  ttp_options.check = config.dispute_check;
  ttp_options.shared_extra_bits = config.shared_extra_bits;
  ttp_options.shared_key_seed = shared_key_seed(config.seed);
  TrustedParty ttp(keys.ttp, keyring, &counter, ttp_options);
  CertificateAuthority ca(keys.ca, keys.ttp.pub, &counter);

  Initiator initiator(keys.a, keyring, &counter);
  initiator.register_with(contract, ttp, ca);
  Responder responder(keys.b, keyring, contract, &counter);

  std::map<PartyId, std::unique_ptr<Agent>> agents;
  agents[PartyId::A] =
      std::make_unique<InitiatorAgent>(initiator, config.strategy_a, config.seed, &counter);
  if (config.strategy_b == Strategy::HONEST)
    agents[PartyId::B] = std::make_unique<HonestResponderAgent>(responder, config.timeout_ticks);
  else
    agents[PartyId::B] = std::make_unique<DeviatingResponderAgent>(
        responder, config.strategy_b, keyring, config.timeout_ticks, &counter);
  agents[PartyId::TTP] = std::make_unique<TtpAgent>(ttp, config.broken_ttp);

  Transport net;
  std::uint64_t ttp_received = 0;
  agents[PartyId::A]->start(net);
  for (;;) {
    bool timers = false;
    for (const auto& [id, agent] : agents) timers = timers || agent->timer_pending();
    if (net.idle() && !timers) break;
    if (net.tick() >= config.max_ticks)
      throw Error(Errc::livelock, "no quiescence within " + std::to_string(config.max_ticks) + " ticks");
    net.advance();
    for (auto id : kSchedule) {
      for (const auto& env : net.take_deliverable(id)) {
        if (id == PartyId::TTP) ++ttp_received;
        agents[id]->on_message(env, net);
      }
    }
    for (auto id : kSchedule) agents[id]->on_tick(net);
  }

  ScenarioOutcome out;
  out.contract = contract;
  out.a_held_sig = agents[PartyId::A]->held_counterpart_sig();
  out.b_held_sig = agents[PartyId::B]->held_counterpart_sig();
  out.a_has_valid_sig_b = holds_valid(out.a_held_sig, contract, keys.b.pub);
  out.b_has_valid_sig_a = holds_valid(out.b_held_sig, contract, keys.a.pub);
  out.transcript = net.transcript();
  out.exp_counts = counter;
  for (auto id : kSchedule) out.terminal_phases[id] = agents[id]->phase();
  out.ttp_messages_received = ttp_received;
  out.final_tick = net.tick();
  out.messages_sent = net.sent();
  out.messages_delivered = net.delivered();
  return out;
}

bool fairness_holds(const ScenarioOutcome& outcome) {
  return outcome.a_has_valid_sig_b == outcome.b_has_valid_sig_a;
}

std::size_t count_messages(const Transcript& t, std::initializer_list<MsgType> types) {
  std::size_t n = 0;
  for (const auto& e : t)
    for (auto type : types)
      if (e.type == type) ++n;
  return n;
}

std::vector<MsgType> transcript_types(const Transcript& t) {
  std::vector<MsgType> out;
  for (const auto& e : t) out.push_back(e.type);
  return out;
}

ExpectedShape expected_shape(Strategy a, Strategy b) {
  const bool bad_em1 = a == Strategy::A_BAD_EM1_CERT || a == Strategy::A_BAD_EM1_CONTRACT ||
                       a == Strategy::A_BAD_EM1_CIPHERTEXT;
  if (bad_em1) return {false, false, false};
  if (b == Strategy::B_EARLY_DISPUTE) return {true, true, true};
  if (b == Strategy::B_BAD_EM2) {
    // P_a aborts; P_b's dispute carries the bad signature and is rejected.
    return {false, false, true};
  }
  if (a == Strategy::HONEST) return {true, true, false};
  return {true, true, true};  // A_NO_EM3, A_BAD_EM3 against an honest P_b
}

MatrixReport run_cases(const ScenarioConfig& base, const std::vector<Strategy>& a_strategies,
                       const std::vector<Strategy>& b_strategies) {
  if (a_strategies.empty() || b_strategies.empty())
    throw Error(Errc::usage, "empty strategy matrix");
  MatrixReport report;
  for (auto a : a_strategies) {
    for (auto b : b_strategies) {
      ScenarioConfig cfg = base;
      cfg.strategy_a = a;
      cfg.strategy_b = b;
      ScenarioResult r{a, b, run_scenario(cfg)};
      r.fair = fairness_holds(r.outcome);
      auto shape = expected_shape(a, b);
      r.shape_matches = r.outcome.a_has_valid_sig_b == shape.a_has_sig_b &&
                        r.outcome.b_has_valid_sig_a == shape.b_has_sig_a &&
                        (r.outcome.ttp_messages_received > 0) == shape.ttp_contacted;
      std::string label = std::string(strategy_name(a)) + " x " + std::string(strategy_name(b));
      if (!r.fair)
        report.violations.push_back("fairness violation: " + label);
      else if (!r.shape_matches && !base.broken_ttp)
        report.violations.push_back("unexpected terminal shape: " + label);
      report.results.push_back(std::move(r));
    }
  }
  return report;
}

MatrixReport run_all_cases(const ScenarioConfig& base) {
  return run_cases(base, strategies_for(PartyId::A), strategies_for(PartyId::B));
}

// ---- metrics ----

bool MetricsReport::all_match() const {
  for (const auto& c : cells)
    if (!c.matches()) return false;
  return true;
}

std::string MetricsReport::render() const {
  std::ostringstream os;
  os << "metric                     published  measured  status\n";
  for (const auto& c : cells) {
    std::string measured = c.measured ? std::to_string(*c.measured) : "n/a";
    std::string status = !c.measured ? "not-measured" : (c.matches() ? "match" : "MISMATCH");
    os << c.name << std::string(c.name.size() < 27 ? 27 - c.name.size() : 1, ' ') << c.published
       << std::string(11 - std::to_string(c.published).size(), ' ') << measured
       << std::string(measured.size() < 10 ? 10 - measured.size() : 1, ' ') << status << '\n';
  }
  os << "\nitemization:\n";
  for (const auto& line : itemization) os << "  " << line << '\n';
  return os.str();
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json j{{"metric", c.name}, {"published", c.published}};
    j["measured"] = c.measured ? nlohmann::json(*c.measured) : nlohmann::json(nullptr);
    j["status"] = !c.measured ? "not-measured" : (c.matches() ? "match" : "mismatch");
    cells_json.push_back(std::move(j));
  }
  return {{"record", "metrics"}, {"cells", cells_json}, {"itemization", itemization}};
}

namespace {

void itemize(std::vector<std::string>& out, const std::string& label, const ExpCounter& counts,
             Phase phase) {
  std::ostringstream os;
  os << label << " (" << phase_name(phase) << " phase): ";
  bool first = true;
  for (auto party : {PartyId::A, PartyId::B, PartyId::TTP, PartyId::CA}) {
    auto n = counts.get(party, phase);
    if (n == 0) continue;
    if (!first) os << " + ";
    os << party_name(party) << '=' << n;
    first = false;
  }
  os << " = " << counts.phase_total(phase);
  out.push_back(os.str());
}

}  // namespace

MetricsReport metrics_report(const ScenarioOutcome& honest, const ScenarioOutcome* dispute) {
  MetricsReport r;
  r.cells.push_back({"messages-exchange", 3,
                     count_messages(honest.transcript, {MsgType::em1, MsgType::em2, MsgType::em3})});
  MetricCell msg_dispute{"messages-dispute", 3, std::nullopt};
  r.cells.push_back({"exp-exchange", 6, honest.exp_counts.phase_total(Phase::exchange)});
  MetricCell exp_dispute{"exp-dispute", 7, std::nullopt};
  if (dispute) {
    msg_dispute.measured = count_messages(
        dispute->transcript,
        {MsgType::drm1, MsgType::drm2, MsgType::drm3, MsgType::dispute_rejected});
    exp_dispute.measured = dispute->exp_counts.phase_total(Phase::dispute);
  }
  r.cells.insert(r.cells.begin() + 1, msg_dispute);
  r.cells.push_back(exp_dispute);

  itemize(r.itemization, "honest run", honest.exp_counts, Phase::exchange);
  r.itemization.push_back(
      "  A: encrypt Sig_a(C) under pk_at (1), verify Sig_b(C) (1); "
      "B: verify C_at and C-Cert (2), sign C (1), verify Sig_a(C) (1)");
  if (dispute) {
    itemize(r.itemization, "dispute run", dispute->exp_counts, Phase::dispute);
    auto ttp = dispute->exp_counts.get(PartyId::TTP, Phase::dispute);
    if (ttp == 5)
      r.itemization.push_back(
          "  TTP: verify C_at (1), verify C-Cert (1), decrypt enc.pk_at(Sig_a(C)) (1), verify "
          "recovered Sig_a(C) (1), verify Sig_b(C) (1); A: verify DR-M2 (1); B: verify DR-M3 (1)");
    else if (ttp == 4)
      r.itemization.push_back(
          "  TTP (hash-compare check): verify C_at (1), verify C-Cert (1), compare "
          "h(enc.pk_at(Sig_a(C))) with heSig (0), verify Sig_b(C) (1), decrypt for recovery (1); "
          "A: verify DR-M2 (1); B: verify DR-M3 (1); deviates from the default counting model");
  } else {
    r.itemization.push_back("dispute run: not measured");
  }
  return r;
}

// ---- rendering ----

nlohmann::json outcome_record(const ScenarioConfig& config, const ScenarioOutcome& outcome) {
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& e : outcome.transcript)
    transcript.push_back({{"tick", e.tick},
                          {"from", party_name(e.from)},
                          {"to", party_name(e.to)},
                          {"type", msg_type_name(e.type)},
                          {"sha256", hash(e.wire).hex()}});
  nlohmann::json exps = nlohmann::json::object();
  for (const auto& [key, n] : outcome.exp_counts.counts())
    exps[std::string(party_name(key.first)) + "/" + std::string(phase_name(key.second))] = n;
  nlohmann::json phases = nlohmann::json::object();
  for (const auto& [id, p] : outcome.terminal_phases) phases[std::string(party_name(id))] = p;
  return {{"record", "scenario"},
          {"strategy_a", strategy_name(config.strategy_a)},
          {"strategy_b", strategy_name(config.strategy_b)},
          {"seed", config.seed},
          {"a_has_valid_sig_b", outcome.a_has_valid_sig_b},
          {"b_has_valid_sig_a", outcome.b_has_valid_sig_a},
          {"fair", fairness_holds(outcome)},
          {"ttp_messages_received", outcome.ttp_messages_received},
          {"final_tick", outcome.final_tick},
          {"terminal_phases", phases},
          {"exp_counts", exps},
          {"transcript", transcript}};
}

std::string render_outcome(const ScenarioConfig& config, const ScenarioOutcome& outcome) {
  std::ostringstream os;
  os << "scenario: A=" << strategy_name(config.strategy_a)
     << " B=" << strategy_name(config.strategy_b) << " seed=" << config.seed << '\n';
  os << "transcript:\n";
  for (const auto& e : outcome.transcript)
    os << "  t=" << e.tick << "  " << party_name(e.from) << " -> " << party_name(e.to) << "  "
       << msg_type_name(e.type) << "  (" << e.wire.size() << " octets)\n";
  os << "terminal phases:";
  for (const auto& [id, p] : outcome.terminal_phases) os << ' ' << party_name(id) << '=' << p;
  os << "\npossession: A holds valid Sig_b(C): " << (outcome.a_has_valid_sig_b ? "yes" : "no")
     << ", B holds valid Sig_a(C): " << (outcome.b_has_valid_sig_a ? "yes" : "no") << '\n';
  os << "fairness: " << (fairness_holds(outcome) ? "holds" : "VIOLATED") << '\n';
  os << "modular exponentiations:";
  for (auto phase : {Phase::registration, Phase::exchange, Phase::dispute})
    os << ' ' << phase_name(phase) << '=' << outcome.exp_counts.phase_total(phase);
  os << '\n';
  return os.str();
}

}  // namespace fairsign
