#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "skillprobe/skillhost.hpp"

namespace skillprobe::wire {

// Newline-delimited JSON over a local TCP socket.
//
// Request frames:  {"op": "open"|"say"|"enable"|"disable"|"close",
//                   "session"?, "text"?, "skill_id"?}
// Response frames: {"ok": bool, "session"?, "kind"?, "text"?,
//                   "invoked_skill_id"?, "enabled_skill_ids"?,
//                   "error_code"?, "error"?}
//
// A malformed frame gets {"ok": false, "error_code": "bad_request"} and the
// connection stays usable for the next frame.
class HostServer {
 public:
  // port 0 binds an ephemeral port; read it back with port() after start().
  HostServer(host::HostBackend& backend, std::uint16_t port = 0);
  ~HostServer();

  HostServer(const HostServer&) = delete;
  HostServer& operator=(const HostServer&) = delete;

  void start();  // throws std::runtime_error if the socket cannot be bound
  void stop();   // drains in-flight requests, then joins all threads
  std::uint16_t port() const { return port_; }

 private:
  void accept_loop();
  void serve_connection(int fd);

  host::HostBackend& backend_;
  std::uint16_t port_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::set<int> conn_fds_;
  std::vector<std::thread> conn_threads_;
};

// Client side of the protocol; implements the same interface as the
// in-process host so callers cannot tell which backend they drive.
class WireClient : public host::HostBackend {
 public:
  WireClient(const std::string& host, std::uint16_t port);
  ~WireClient() override;

  WireClient(const WireClient&) = delete;
  WireClient& operator=(const WireClient&) = delete;

  std::string open_session() override;
  host::HostResponse say(const std::string& session_id,
                         const std::string& text) override;
  std::vector<std::string> set_skill_enabled(const std::string& session_id,
                                             const std::string& skill_id,
                                             bool enabled) override;
  void close_session(const std::string& session_id) override;

 private:
  std::string roundtrip(const std::string& frame);

  std::mutex mu_;
  int fd_ = -1;
  std::string inbuf_;
};

}  // namespace skillprobe::wire
