// fairsign: run fair contract-signing scenarios, the fairness matrix, the
// cost metrics, or one protocol role over TCP.
//
// Exit codes: 0 success / fairness holds, 1 violation or protocol failure,
// 2 usage error.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fairsign/keyfile.hpp"
#include "fairsign/net.hpp"
#include "fairsign/simulation.hpp"

using namespace fairsign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::vector<Strategy> parse_strategy_list(const std::string& text, PartyId party) {
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto s = parse_strategy(item);
    if (!s || !strategy_applies_to(*s, party))
      throw Error(Errc::usage, "invalid strategy for " + std::string(party_name(party)) + ": " + item);
    out.push_back(*s);
  }
  if (out.empty()) throw Error(Errc::usage, "empty strategy list");
  return out;
}

DisputeCheck parse_check(const std::string& text) {
  if (text == "decrypt_verify") return DisputeCheck::decrypt_verify;
  if (text == "hash_compare") return DisputeCheck::hash_compare;
  throw Error(Errc::usage, "invalid dispute check: " + text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair contract signing with an offline TTP"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  bool records = false;

  // run
  auto* run = app.add_subcommand("run", "Run one scenario and print its transcript");
  std::string run_a = "HONEST", run_b = "HONEST", run_config, run_check = "decrypt_verify";
  std::size_t run_bits = 512;
  std::uint32_t run_timeout = 10;
  run->add_option("--a", run_a, "Strategy for P_a");
  run->add_option("--b", run_b, "Strategy for P_b");
  run->add_option("--seed", seed, "Scenario seed")->envname("FAIRSIGN_SEED");
  run->add_option("--key-bits", run_bits, "Party modulus size");
  run->add_option("--timeout-ticks", run_timeout, "Ticks P_b waits for E-M3");
  run->add_option("--dispute-check", run_check, "decrypt_verify or hash_compare");
  run->add_option("--config", run_config, "key=value scenario file (flags given later win)")
      ->check(CLI::ExistingFile);
  run->add_flag("--records", records, "Emit line-delimited JSON records");

  // matrix
  auto* matrix = app.add_subcommand("matrix", "Run the full strategy matrix and check fairness");
  std::string only_a, only_b;
  bool broken_ttp = false;
  std::size_t matrix_bits = 512;
  matrix->add_option("--seed", seed, "Scenario seed")->envname("FAIRSIGN_SEED");
  matrix->add_option("--key-bits", matrix_bits, "Party modulus size");
  auto* only_a_opt = matrix->add_option("--only-a", only_a, "Comma-separated P_a strategies");
  auto* only_b_opt = matrix->add_option("--only-b", only_b, "Comma-separated P_b strategies");
  matrix->add_flag("--self-test-broken-ttp", broken_ttp,
                   "Negative control: TTP never sends DR-M2");
  matrix->add_flag("--records", records, "Emit line-delimited JSON records");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Compare measured costs with the published ones");
  std::string metrics_check = "decrypt_verify";
  bool honest_only = false;
  metrics->add_option("--seed", seed, "Scenario seed")->envname("FAIRSIGN_SEED");
  metrics->add_option("--dispute-check", metrics_check, "decrypt_verify or hash_compare");
  metrics->add_flag("--honest-only", honest_only, "Measure only the honest run");
  metrics->add_flag("--records", records, "Emit a JSON record");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run one role over TCP");
  std::string role_name, key_path, strategy_name_arg = "HONEST", contract = ScenarioConfig{}.contract_text;
  std::uint16_t port = 0;
  std::vector<std::string> peer_specs, pub_specs;
  int timeout_ms = 2000, retry_ms = 10000, max_seconds = 0;
  bool exit_when_done = false;
  std::string serve_check = "decrypt_verify";
  serve_cmd->add_option("--role", role_name, "A, B, TTP or CA")->required();
  serve_cmd->add_option("--port", port, "Listen port")->required();
  serve_cmd->add_option("--peer", peer_specs, "ROLE=host:port (repeatable)");
  serve_cmd->add_option("--key", key_path, "Own private key file")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--pub", pub_specs, "ROLE=public key file (repeatable)");
  serve_cmd->add_option("--contract", contract, "Contract text");
  serve_cmd->add_option("--strategy", strategy_name_arg, "HONEST or A_NO_EM3 (role A)");
  serve_cmd->add_option("--seed", seed, "Scenario seed (TTP shared-key derivation)")->envname("FAIRSIGN_SEED");
  serve_cmd->add_option("--dispute-check", serve_check, "decrypt_verify or hash_compare");
  serve_cmd->add_option("--timeout-ms", timeout_ms, "P_b wait for E-M3");
  serve_cmd->add_option("--send-retry-ms", retry_ms, "Retry window for outbound messages");
  serve_cmd->add_option("--max-seconds", max_seconds, "Stop after this long (0 = no limit)");
  serve_cmd->add_flag("--exit-when-done", exit_when_done, "Exit when this role has finished");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Generate an RSA key pair");
  std::size_t keygen_bits = 512;
  std::string out_prefix;
  std::optional<std::uint64_t> keygen_seed;
  keygen->add_option("--bits", keygen_bits, "Modulus size (>= 264)");
  keygen->add_option("--seed", keygen_seed, "Deterministic seed")->envname("FAIRSIGN_SEED");
  keygen->add_option("--out", out_prefix, "Writes <out>.key and <out>.pub")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) {
      ScenarioConfig cfg;
      if (!run_config.empty()) cfg = load_scenario_config([&] {
        auto bytes = read_file(run_config);
        return std::string(bytes.begin(), bytes.end());
      }());
      auto a = parse_strategy(run_a);
      auto b = parse_strategy(run_b);
      if (!a || !strategy_applies_to(*a, PartyId::A))
        throw Error(Errc::usage, "invalid strategy for A: " + run_a);
      if (!b || !strategy_applies_to(*b, PartyId::B))
        throw Error(Errc::usage, "invalid strategy for B: " + run_b);
      if (run->count("--a") || run_config.empty()) cfg.strategy_a = *a;
      if (run->count("--b") || run_config.empty()) cfg.strategy_b = *b;
      if (run->count("--seed") || run_config.empty()) cfg.seed = seed;
      if (run->count("--key-bits") || run_config.empty()) cfg.key_bits = run_bits;
      if (run->count("--timeout-ticks") || run_config.empty()) cfg.timeout_ticks = run_timeout;
      if (run->count("--dispute-check") || run_config.empty()) cfg.dispute_check = parse_check(run_check);
      auto outcome = run_scenario(cfg);
      if (records) std::cout << outcome_record(cfg, outcome).dump() << '\n';
      else std::cout << render_outcome(cfg, outcome);
      return fairness_holds(outcome) ? kExitOk : kExitFailure;
    }

    if (*matrix) {
      ScenarioConfig base;
      base.seed = seed;
      base.key_bits = matrix_bits;
      base.broken_ttp = broken_ttp;
      auto a_list = only_a_opt->count() ? parse_strategy_list(only_a, PartyId::A) : strategies_for(PartyId::A);
      auto b_list = only_b_opt->count() ? parse_strategy_list(only_b, PartyId::B) : strategies_for(PartyId::B);
      auto report = run_cases(base, a_list, b_list);
      for (const auto& r : report.results) {
        ScenarioConfig cfg = base;
        cfg.strategy_a = r.a;
        cfg.strategy_b = r.b;
        if (records) {
          std::cout << outcome_record(cfg, r.outcome).dump() << '\n';
        } else {
          std::string label = std::string(strategy_name(r.a)) + " x " + std::string(strategy_name(r.b));
          label.resize(44, ' ');
          std::cout << label << " A:" << (r.outcome.a_has_valid_sig_b ? "sig " : "none")
                    << " B:" << (r.outcome.b_has_valid_sig_a ? "sig " : "none")
                    << " ttp_msgs=" << r.outcome.ttp_messages_received
                    << (r.fair ? "  fair" : "  UNFAIR") << '\n';
        }
      }
      if (records) {
        nlohmann::json summary{{"record", "matrix_summary"},
                               {"scenarios", report.results.size()},
                               {"violations", report.violations}};
        std::cout << summary.dump() << '\n';
      } else {
        std::cout << report.results.size() << " scenarios, " << report.violations.size()
                  << " violations\n";
      }
      for (const auto& v : report.violations) std::cerr << v << '\n';
      return report.ok() ? kExitOk : kExitFailure;
    }

    if (*metrics) {
      ScenarioConfig base;
      base.seed = seed;
      base.dispute_check = parse_check(metrics_check);
      auto honest = run_scenario(base);
      std::optional<ScenarioOutcome> dispute;
      if (!honest_only) {
        ScenarioConfig d = base;
        d.strategy_a = Strategy::A_NO_EM3;
        dispute = run_scenario(d);
      }
      auto report = metrics_report(honest, dispute ? &*dispute : nullptr);
      if (records) std::cout << report.to_json().dump() << '\n';
      else std::cout << report.render();
      return kExitOk;
    }

    if (*serve_cmd) {
      ServeOptions opt;
      auto role = parse_party(role_name);
      if (!role) throw Error(Errc::usage, "invalid role: " + role_name);
      opt.role = *role;
      opt.port = port;
      for (const auto& spec : peer_specs) {
        auto eq = spec.find('=');
        auto peer = eq == std::string::npos ? std::nullopt : parse_party(spec.substr(0, eq));
        auto ep = eq == std::string::npos ? std::nullopt : parse_endpoint(spec.substr(eq + 1));
        if (!peer || !ep) throw Error(Errc::usage, "invalid --peer: " + spec);
        opt.peers[*peer] = *ep;
      }
      for (const auto& spec : pub_specs) {
        auto eq = spec.find('=');
        auto peer = eq == std::string::npos ? std::nullopt : parse_party(spec.substr(0, eq));
        if (!peer) throw Error(Errc::usage, "invalid --pub: " + spec);
        opt.keyring.add(*peer, load_public_key(spec.substr(eq + 1)));
      }
      opt.keys = load_private_key(key_path);
      opt.keyring.add(opt.role, opt.keys.pub);
      opt.contract_text = contract;
      auto strategy = parse_strategy(strategy_name_arg);
      if (!strategy) throw Error(Errc::usage, "invalid strategy: " + strategy_name_arg);
      opt.strategy = *strategy;
      opt.seed = seed;
      opt.dispute_check = parse_check(serve_check);
      opt.timeout = std::chrono::milliseconds(timeout_ms);
      opt.send_retry = std::chrono::milliseconds(retry_ms);
      opt.exit_when_done = exit_when_done;
      if (max_seconds > 0) opt.max_runtime = std::chrono::seconds(max_seconds);
      return serve(opt, std::cout);
    }

    if (*keygen) {
      auto keys = generate_keypair(keygen_bits, keygen_seed);
      write_file(out_prefix + ".key", encode_private_key_file(keys));
      write_file(out_prefix + ".pub", encode_public_key_file(keys.pub));
      std::cout << "wrote " << out_prefix << ".key and " << out_prefix << ".pub ("
                << keys.pub.bits() << "-bit modulus)\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "fairsign: " << e.what() << '\n';
    if (e.code() == Errc::usage || e.code() == Errc::modulus_too_small ||
        e.code() == Errc::malformed_key_file)
      return kExitUsage;
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "fairsign: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
