#pragma once

// Runs one protocol role as a process talking framed messages over TCP.
// Each frame is a 4-octet big-endian length followed by an encoded message.
// Only the honest machines run here, plus an initiator that withholds E-M3.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "fairsign/simulation.hpp"

namespace fairsign {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

std::optional<Endpoint> parse_endpoint(std::string_view text);

struct ServeOptions {
  PartyId role = PartyId::A;
  std::uint16_t port = 0;
  std::map<PartyId, Endpoint> peers;
  RsaKeyPair keys;
  Keyring keyring;
  std::string contract_text = ScenarioConfig{}.contract_text;
  Strategy strategy = Strategy::HONEST;
  // Scenario seed; the TTP derives the shared key from it.
  std::uint64_t seed = 1;
  std::size_t shared_extra_bits = 16;
  DisputeCheck dispute_check = DisputeCheck::decrypt_verify;
  std::chrono::milliseconds timeout{2000};
  // How long an outbound message is retried before it is logged undeliverable.
  std::chrono::milliseconds send_retry{10000};
  // Exit once this role's part of the session is complete.
  bool exit_when_done = false;
  std::optional<std::chrono::milliseconds> max_runtime;
};

// Blocks until done (or runtime limit / fatal error). Log lines are JSON
// records. Returns a process exit code.
int serve(const ServeOptions& options, std::ostream& log);

// Reads and decodes one frame from a connected socket. Used by the server
// and exposed for tests.
struct FrameResult {
  enum class Status { ok, closed, malformed } status = Status::closed;
  Bytes payload;
  std::string error;
};
FrameResult read_frame(int fd);
bool write_all(int fd, ByteView octets);
int connect_to(const Endpoint& ep);

}  // namespace fairsign
