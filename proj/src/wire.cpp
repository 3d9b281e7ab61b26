#include "skillprobe/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "json.hpp"

namespace skillprobe::wire {

namespace {

using json = nlohmann::ordered_json;

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("socket write failed");
    }
    off += static_cast<std::size_t>(n);
  }
}

// Pulls one '\n'-terminated line out of buf, reading more as needed.
// Returns false on orderly shutdown with no pending line.
bool read_line(int fd, std::string& buf, std::string& line) {
  for (;;) {
    auto nl = buf.find('\n');
    if (nl != std::string::npos) {
      line = buf.substr(0, nl);
      buf.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    char chunk[4096];
    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (n == 0) return false;
    buf.append(chunk, static_cast<std::size_t>(n));
  }
}

json error_frame(const std::string& code, const std::string& message) {
  json out;
  out["ok"] = false;
  out["error_code"] = code;
  out["error"] = message;
  return out;
}

json handle_frame(host::HostBackend& backend, const std::string& line) {
  json req;
  try {
    req = json::parse(line);
  } catch (const json::exception&) {
    return error_frame("bad_request", "frame is not valid JSON");
  }
  if (!req.is_object() || !req.contains("op") || !req.at("op").is_string())
    return error_frame("bad_request", "frame has no op");
  const std::string op = req.at("op").get<std::string>();

  auto str_field = [&](const char* key) -> std::optional<std::string> {
    if (!req.contains(key) || !req.at(key).is_string()) return std::nullopt;
    return req.at(key).get<std::string>();
  };

  try {
    if (op == "open") {
      json out;
      out["ok"] = true;
      out["session"] = backend.open_session();
      return out;
    }
    if (op == "say") {
      auto session = str_field("session");
      auto text = str_field("text");
      if (!session || !text)
        return error_frame("bad_request", "say needs session and text");
      host::HostResponse r = backend.say(*session, *text);
      json out;
      out["ok"] = true;
      out["kind"] = host::to_string(r.kind);
      out["text"] = r.text;
      if (r.invoked_skill_id) out["invoked_skill_id"] = *r.invoked_skill_id;
      out["enabled_skill_ids"] = r.enabled_skill_ids;
      return out;
    }
    if (op == "enable" || op == "disable") {
      auto session = str_field("session");
      auto skill = str_field("skill_id");
      if (!session || !skill)
        return error_frame("bad_request", op + " needs session and skill_id");
      auto enabled = backend.set_skill_enabled(*session, *skill, op == "enable");
      json out;
      out["ok"] = true;
      out["enabled_skill_ids"] = enabled;
      return out;
    }
    if (op == "close") {
      auto session = str_field("session");
      if (!session) return error_frame("bad_request", "close needs session");
      backend.close_session(*session);
      json out;
      out["ok"] = true;
      return out;
    }
  } catch (const host::ProtocolError& e) {
    return error_frame(e.code(), e.what());
  }
  return error_frame("bad_request", "unknown op: " + op);
}

}  // namespace

HostServer::HostServer(host::HostBackend& backend, std::uint16_t port)
    : backend_(backend), port_(port) {}

HostServer::~HostServer() { stop(); }

void HostServer::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("cannot create socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port_);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot bind port " + std::to_string(port_));
  }
  if (::listen(listen_fd_, 64) < 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot listen");
  }
  if (port_ == 0) {
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
  }
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void HostServer::stop() {
  if (!running_.exchange(false)) return;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    // Stop reads; in-flight responses still go out before the threads exit.
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RD);
  }
  for (auto& t : conn_threads_)
    if (t.joinable()) t.join();
  conn_threads_.clear();
}

void HostServer::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;  // listener closed
    }
    std::lock_guard<std::mutex> lock(conn_mu_);
    conn_fds_.insert(fd);
    conn_threads_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void HostServer::serve_connection(int fd) {
  std::string buf, line;
  while (read_line(fd, buf, line)) {
    if (line.empty()) continue;
    json out = handle_frame(backend_, line);
    try {
      write_all(fd, out.dump() + "\n");
    } catch (const std::runtime_error&) {
      break;  // peer went away mid-response
    }
  }
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    conn_fds_.erase(fd);
  }
  ::close(fd);
}

WireClient::WireClient(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw std::runtime_error("cannot create socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw std::runtime_error("bad host address: " + host);
  }
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(fd_);
    throw std::runtime_error("cannot connect to " + host + ":" +
                             std::to_string(port));
  }
}

WireClient::~WireClient() {
  if (fd_ >= 0) ::close(fd_);
}

std::string WireClient::roundtrip(const std::string& frame) {
  std::lock_guard<std::mutex> lock(mu_);
  write_all(fd_, frame + "\n");
  std::string line;
  if (!read_line(fd_, inbuf_, line))
    throw std::runtime_error("server closed the connection");
  return line;
}

std::string WireClient::open_session() {
  json req;
  req["op"] = "open";
  json resp = json::parse(roundtrip(req.dump()));
  if (!resp.value("ok", false))
    throw host::ProtocolError(resp.value("error_code", "bad_request"),
                              resp.value("error", "request failed"));
  return resp.at("session").get<std::string>();
}

host::HostResponse WireClient::say(const std::string& session_id,
                                   const std::string& text) {
  json req;
  req["op"] = "say";
  req["session"] = session_id;
  req["text"] = text;
  json resp = json::parse(roundtrip(req.dump()));
  if (!resp.value("ok", false))
    throw host::ProtocolError(resp.value("error_code", "bad_request"),
                              resp.value("error", "request failed"));
  host::HostResponse out;
  out.text = resp.value("text", "");
  out.kind = host::response_kind_from_string(resp.value("kind", "speech"))
                 .value_or(host::ResponseKind::Speech);
  if (resp.contains("invoked_skill_id"))
    out.invoked_skill_id = resp.at("invoked_skill_id").get<std::string>();
  if (resp.contains("enabled_skill_ids"))
    out.enabled_skill_ids =
        resp.at("enabled_skill_ids").get<std::vector<std::string>>();
  return out;
}

std::vector<std::string> WireClient::set_skill_enabled(
    const std::string& session_id, const std::string& skill_id, bool enabled) {
  json req;
  req["op"] = enabled ? "enable" : "disable";
  req["session"] = session_id;
  req["skill_id"] = skill_id;
  json resp = json::parse(roundtrip(req.dump()));
  if (!resp.value("ok", false))
    throw host::ProtocolError(resp.value("error_code", "bad_request"),
                              resp.value("error", "request failed"));
  return resp.value("enabled_skill_ids", std::vector<std::string>{});
}

void WireClient::close_session(const std::string& session_id) {
  json req;
  req["op"] = "close";
  req["session"] = session_id;
  json resp = json::parse(roundtrip(req.dump()));
  if (!resp.value("ok", false))
    throw host::ProtocolError(resp.value("error_code", "bad_request"),
                              resp.value("error", "request failed"));
}

}  // namespace skillprobe::wire
