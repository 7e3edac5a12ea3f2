#include "fairsign/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace fairsign {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::optional<Endpoint> parse_endpoint(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port == 0 || port > 65535)
    return std::nullopt;
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

namespace {

bool read_exact(int fd, std::uint8_t* out, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    ssize_t r = ::recv(fd, out + got, n - got, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    got += static_cast<std::size_t>(r);
  }
  return true;
}

}  // namespace

FrameResult read_frame(int fd) {
  FrameResult result;
  std::uint8_t header[4];
  if (!read_exact(fd, header, 4)) return result;
  std::uint32_t len = get_u32(ByteView(header, 4));
  if (len == 0 || len > kMaxFrameBytes) {
    result.status = FrameResult::Status::malformed;
    result.error = "frame length " + std::to_string(len) + " out of range";
    return result;
  }
  result.payload.resize(len);
  if (!read_exact(fd, result.payload.data(), len)) {
    result.status = FrameResult::Status::malformed;
    result.error = "connection closed mid-frame";
    return result;
  }
  result.status = FrameResult::Status::ok;
  return result;
}

bool write_all(int fd, ByteView octets) {
  std::size_t sent = 0;
  while (sent < octets.size()) {
    ssize_t w = ::send(fd, octets.data() + sent, octets.size() - sent, MSG_NOSIGNAL);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) return false;
    sent += static_cast<std::size_t>(w);
  }
  return true;
}

int connect_to(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(ep.host.c_str(), std::to_string(ep.port).c_str(), &hints, &res) != 0) return -1;
  int fd = -1;
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd >= 0) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  return fd;
}

namespace {

class Log {
 public:
  Log(std::ostream& out, PartyId role) : out_(out), role_(role) {}

  void write(json record) {
    record["role"] = party_name(role_);
    std::lock_guard lock(mu_);
    out_ << record.dump() << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  PartyId role_;
  std::mutex mu_;
};

class Inbox {
 public:
  void push(ProtocolMessage msg) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(msg));
    }
    cv_.notify_one();
  }

  std::optional<ProtocolMessage> pop(std::chrono::milliseconds wait) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, wait, [&] { return !queue_.empty(); })) return std::nullopt;
    auto msg = std::move(queue_.front());
    queue_.pop_front();
    return msg;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<ProtocolMessage> queue_;
};

// One sender per peer over a persistent connection; reconnects and resends
// until `retry` elapses for a message, then reports it undeliverable.
class Outbox {
 public:
  Outbox(PartyId peer, Endpoint ep, std::chrono::milliseconds retry, Log& log)
      : peer_(peer), ep_(std::move(ep)), retry_(retry), log_(log), thread_([this] { run(); }) {}

  ~Outbox() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    thread_.join();
    if (fd_ >= 0) ::close(fd_);
  }

  void send(Bytes framed, MsgType type) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back({std::move(framed), type});
    }
    cv_.notify_all();
  }

  // Waits until every queued message has been written or given up on.
  bool drain(std::chrono::milliseconds limit) {
    std::unique_lock lock(mu_);
    return idle_cv_.wait_for(lock, limit, [&] { return queue_.empty() && !busy_; });
  }

 private:
  struct Item {
    Bytes framed;
    MsgType type;
  };

  void run() {
    for (;;) {
      Item item;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
        item = std::move(queue_.front());
        queue_.pop_front();
        busy_ = true;
      }
      deliver(item);
      {
        std::lock_guard lock(mu_);
        busy_ = false;
      }
      idle_cv_.notify_all();
    }
  }

  bool stopping() {
    std::lock_guard lock(mu_);
    return stopping_;
  }

  void deliver(const Item& item) {
    auto deadline = Clock::now() + retry_;
    while (!stopping()) {
      if (fd_ < 0) fd_ = connect_to(ep_);
      if (fd_ >= 0 && write_all(fd_, item.framed)) return;
      if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
      }
      if (Clock::now() >= deadline) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    log_.write({{"event", "undeliverable"},
                {"to", party_name(peer_)},
                {"type", msg_type_name(item.type)}});
  }

  PartyId peer_;
  Endpoint ep_;
  std::chrono::milliseconds retry_;
  Log& log_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<Item> queue_;
  bool stopping_ = false;
  bool busy_ = false;
  int fd_ = -1;
  std::thread thread_;
};

class Listener {
 public:
  Listener(std::uint16_t port, Inbox& inbox, Log& log) : inbox_(inbox), log_(log) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw Error(Errc::usage, "socket() failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd_, 16) != 0) {
      ::close(fd_);
      throw Error(Errc::usage, "cannot bind port " + std::to_string(port) + ": " + std::strerror(errno));
    }
    thread_ = std::thread([this] { accept_loop(); });
  }

  ~Listener() {
    stopping_ = true;
    thread_.join();
    ::close(fd_);
    std::lock_guard lock(mu_);
    for (int fd : connections_) ::shutdown(fd, SHUT_RDWR);
    for (auto& t : readers_) t.join();
  }

 private:
  void accept_loop() {
    while (!stopping_) {
      pollfd p{fd_, POLLIN, 0};
      if (::poll(&p, 1, 50) <= 0) continue;
      int conn = ::accept(fd_, nullptr, nullptr);
      if (conn < 0) continue;
      std::lock_guard lock(mu_);
      connections_.push_back(conn);
      readers_.emplace_back([this, conn] { read_loop(conn); });
    }
  }

  void read_loop(int fd) {
    for (;;) {
      auto frame = read_frame(fd);
      if (frame.status == FrameResult::Status::closed) break;
      if (frame.status == FrameResult::Status::malformed) {
        log_.write({{"event", "malformed_frame"}, {"error", frame.error}});
        break;
      }
      try {
        inbox_.push(decode_message(frame.payload));
      } catch (const Error& e) {
        log_.write({{"event", "malformed_frame"}, {"error", e.what()}});
        break;
      }
    }
    ::close(fd);
  }

  Inbox& inbox_;
  Log& log_;
  int fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::vector<int> connections_;
  std::vector<std::thread> readers_;
  std::thread thread_;
};

class RoleRunner {
 public:
  RoleRunner(const ServeOptions& opt, Log& log)
      : opt_(opt), log_(log), contract_(Contract::from_text(opt.contract_text)) {
    switch (opt.role) {
      case PartyId::A: initiator_.emplace(opt.keys, opt.keyring, &counter_); break;
      case PartyId::B: responder_.emplace(opt.keys, opt.keyring, contract_, &counter_); break;
      case PartyId::TTP: {
        TrustedParty::Options o;
        o.check = opt.dispute_check;
        o.shared_extra_bits = opt.shared_extra_bits;
        o.shared_key_seed = shared_key_seed(opt.seed);
        ttp_.emplace(opt.keys, opt.keyring, &counter_, o);
        break;
      }
      case PartyId::CA: ca_.emplace(opt.keys, opt.keyring.at(PartyId::TTP), &counter_); break;
    }
    for (const auto& [peer, ep] : opt.peers)
      outboxes_.emplace(peer, std::make_unique<Outbox>(peer, ep, opt.send_retry, log));
  }

  void start() {
    if (initiator_) send(PartyId::TTP, initiator_->begin_registration(contract_));
  }

  void handle(const ProtocolMessage& msg) {
    auto wire = encode_message(msg);
    log_.write({{"event", "recv"}, {"type", msg_type_name(message_type(msg))}, {"hex", to_hex(wire)}});
    try {
      if (initiator_) on_initiator(msg);
      else if (responder_) on_responder(msg);
      else if (ttp_) on_ttp(msg);
      else on_ca(msg);
    } catch (const Error& e) {
      log_.write({{"event", "error"}, {"error", e.what()}});
    }
    report_phase();
  }

  void tick() {
    if (responder_ && responder_->phase() == PartyPhase::Em2Sent && Clock::now() >= deadline_) {
      log_.write({{"event", "timeout"}});
      responder_->on_timeout();
      send(PartyId::TTP, responder_->build_drm1());
      report_phase();
    }
  }

  bool done() const {
    if (initiator_) {
      auto p = initiator_->phase();
      if (opt_.strategy == Strategy::A_NO_EM3) return p == PartyPhase::Resolved || p == PartyPhase::Aborted;
      return p == PartyPhase::Em3Sent || p == PartyPhase::Resolved || p == PartyPhase::Aborted;
    }
    if (responder_) {
      auto p = responder_->phase();
      return p == PartyPhase::Done || p == PartyPhase::Resolved || p == PartyPhase::Aborted;
    }
    if (ttp_) return ttp_->disputes_received() > 0;
    return ca_ && !ca_->issued_serials().empty();
  }

  void drain(std::chrono::milliseconds limit) {
    for (auto& [peer, box] : outboxes_) box->drain(limit);
  }

 private:
  void send(PartyId to, ProtocolMessage msg) {
    auto it = outboxes_.find(to);
    auto type = message_type(msg);
    auto wire = encode_message(msg);
    log_.write({{"event", "send"}, {"to", party_name(to)}, {"type", msg_type_name(type)},
                {"hex", to_hex(wire)}});
    if (it == outboxes_.end()) {
      log_.write({{"event", "undeliverable"}, {"to", party_name(to)}, {"type", msg_type_name(type)},
                  {"error", "no peer address"}});
      return;
    }
    it->second->send(frame(wire), type);
  }

  void report_phase() {
    std::string phase;
    if (initiator_) phase = party_phase_name(initiator_->phase());
    else if (responder_) phase = party_phase_name(responder_->phase());
    else return;
    if (phase == last_phase_) return;
    last_phase_ = phase;
    json rec{{"event", "phase"}, {"phase", phase}};
    const std::optional<Signature>* held = initiator_ ? &initiator_->counterpart_sig()
                                                      : &responder_->counterpart_sig();
    auto signer = opt_.keyring.at(initiator_ ? PartyId::B : PartyId::A);
    bool valid = *held && (*held)->value < signer.n &&
                 verify_sig(contract_.body(), **held, signer);
    rec["holds_valid_counterpart_sig"] = valid;
    log_.write(std::move(rec));
  }

  void on_initiator(const ProtocolMessage& msg) {
    auto& a = *initiator_;
    if (auto* r = std::get_if<MsgShareKeyResponse>(&msg)) {
      send(PartyId::CA, a.accept_shared_key_cert(r->c_at));
    } else if (auto* r = std::get_if<MsgCertResponse>(&msg)) {
      a.accept_contract_cert(r->c_cert);
      send(PartyId::B, a.build_em1());
    } else if (auto* m = std::get_if<MsgEM2>(&msg)) {
      if (a.phase() != PartyPhase::Em1Sent) return;
      if (!a.verify_em2(*m)) return;
      if (opt_.strategy == Strategy::A_NO_EM3) return;
      send(PartyId::B, a.build_em3());
    } else if (auto* m = std::get_if<MsgDRM2>(&msg)) {
      a.apply_drm2(*m);
    }
  }

  void on_responder(const ProtocolMessage& msg) {
    auto& b = *responder_;
    if (auto* m = std::get_if<MsgEM1>(&msg)) {
      if (b.phase() != PartyPhase::Init) return;
      auto verdict = b.verify_em1(*m);
      if (!verdict.accepted) {
        log_.write({{"event", "rejected"}, {"reason", reject_reason_name(*verdict.reason)}});
        return;
      }
      send(PartyId::A, b.build_em2());
      deadline_ = Clock::now() + opt_.timeout;
    } else if (auto* m = std::get_if<MsgEM3>(&msg)) {
      if (b.phase() != PartyPhase::Em2Sent) return;
      if (!b.verify_em3(*m).accepted) send(PartyId::TTP, b.build_drm1());
    } else if (auto* m = std::get_if<MsgDRM3>(&msg)) {
      b.apply_drm3(*m);
    } else if (auto* m = std::get_if<MsgDisputeRejected>(&msg)) {
      b.apply_rejection(*m);
    }
  }

  void on_ttp(const ProtocolMessage& msg) {
    if (auto* m = std::get_if<MsgShareKeyRequest>(&msg)) {
      send(PartyId::A, MsgShareKeyResponse{ttp_->issue_shared_key(m->initiator_pk)});
    } else if (auto* m = std::get_if<MsgDRM1>(&msg)) {
      auto outcome = ttp_->resolve(*m);
      if (auto* res = std::get_if<Resolution>(&outcome)) {
        send(PartyId::A, res->to_initiator);
        send(PartyId::B, res->to_responder);
      } else {
        send(PartyId::B, std::get<MsgDisputeRejected>(outcome));
      }
    }
  }

  void on_ca(const ProtocolMessage& msg) {
    if (auto* m = std::get_if<MsgCertRequest>(&msg)) {
      auto grant = ca_->issue_contract_cert(ContractCertRequest{m->sig_a, m->contract, m->c_at},
                                            opt_.keyring.at(PartyId::A));
      send(PartyId::A, MsgCertResponse{grant.cert, grant.enc_sig});
    }
  }

  const ServeOptions& opt_;
  Log& log_;
  Contract contract_;
  ExpCounter counter_;
  std::optional<Initiator> initiator_;
  std::optional<Responder> responder_;
  std::optional<TrustedParty> ttp_;
  std::optional<CertificateAuthority> ca_;
  std::map<PartyId, std::unique_ptr<Outbox>> outboxes_;
  Clock::time_point deadline_{};
  std::string last_phase_;
};

}  // namespace

int serve(const ServeOptions& options, std::ostream& out) {
  if (options.role == PartyId::A && options.strategy != Strategy::HONEST &&
      options.strategy != Strategy::A_NO_EM3)
    throw Error(Errc::usage, "serve mode supports HONEST and A_NO_EM3 only");
  if (options.role != PartyId::A && options.strategy != Strategy::HONEST)
    throw Error(Errc::usage, "serve mode supports deviations for role A only");

  Log log(out, options.role);
  Inbox inbox;
  Listener listener(options.port, inbox, log);
  RoleRunner runner(options, log);
  log.write({{"event", "listening"}, {"port", options.port}});

  const auto started = Clock::now();
  runner.start();
  for (;;) {
    if (auto msg = inbox.pop(std::chrono::milliseconds(20))) runner.handle(*msg);
    runner.tick();
    if (options.exit_when_done && runner.done()) {
      runner.drain(options.send_retry);
      log.write({{"event", "done"}});
      return 0;
    }
    if (options.max_runtime && Clock::now() - started >= *options.max_runtime) {
      log.write({{"event", "runtime_limit"}});
      return runner.done() ? 0 : 1;
    }
  }
}

}  // namespace fairsign
