#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "skillprobe/catalog.hpp"
#include "skillprobe/explorer.hpp"
#include "skillprobe/skillhost.hpp"
#include "skillprobe/wire.hpp"
#include "support/fixtures.hpp"

using namespace skillprobe;

namespace {

struct Walkthrough {
  catalog::SkillRecord record;
  host::SkillHost host;

  Walkthrough()
      : record(load_record()),
        host(load_defs(), host::ResolverPolicy{}) {}

  static catalog::SkillRecord load_record() {
    auto cat = catalog::parse_catalog(fixtures::bundled_fixture_dir() /
                                      "walkthrough_catalog.json");
    return cat.records.at(0);
  }
  static host::DefinitionSet load_defs() {
    auto cat = catalog::parse_catalog(fixtures::bundled_fixture_dir() /
                                      "walkthrough_catalog.json");
    return host::load_skill_definitions(
        fixtures::bundled_fixture_dir() / "walkthrough_skills.json", &cat.records);
  }
};

// Raw line-oriented TCP client for protocol-level assertions.
struct RawConn {
  int fd = -1;
  std::string buf;

  explicit RawConn(std::uint16_t port) {
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
  }
  ~RawConn() {
    if (fd >= 0) ::close(fd);
  }

  void send_line(const std::string& line) {
    std::string framed = line + "\n";
    std::size_t off = 0;
    while (off < framed.size()) {
      ssize_t n = ::send(fd, framed.data() + off, framed.size() - off, 0);
      REQUIRE(n > 0);
      off += static_cast<std::size_t>(n);
    }
  }

  std::string recv_line() {
    for (;;) {
      auto nl = buf.find('\n');
      if (nl != std::string::npos) {
        std::string line = buf.substr(0, nl);
        buf.erase(0, nl + 1);
        return line;
      }
      char chunk[512];
      ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
      REQUIRE(n > 0);
      buf.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

}  // namespace

TEST_CASE("a scripted conversation behaves the same over the socket") {
  Walkthrough w;
  wire::HostServer server(w.host);
  server.start();
  REQUIRE(server.port() != 0);
  {
    wire::WireClient client("127.0.0.1", server.port());

    host::SkillHost local(Walkthrough::load_defs(), host::ResolverPolicy{});
    auto lsid = local.open_session();
    auto rsid = client.open_session();

    for (const char* utt :
         {"Open Skill X", "continue", "no", "banana", "Launch Skill X"}) {
      auto a = local.say(lsid, utt);
      auto b = client.say(rsid, utt);
      CHECK(a.text == b.text);
      CHECK(a.kind == b.kind);
      CHECK(a.invoked_skill_id == b.invoked_skill_id);
      CHECK(a.enabled_skill_ids == b.enabled_skill_ids);
    }

    auto enabled = client.set_skill_enabled(rsid, "demo.skill-x", false);
    CHECK(enabled.empty());
    client.close_session(rsid);
  }
  server.stop();
}

TEST_CASE("exploring through the socket matches exploring in process") {
  Walkthrough w;
  wire::HostServer server(w.host);
  server.start();
  {
    wire::WireClient client("127.0.0.1", server.port());

    host::SkillHost local(Walkthrough::load_defs(), host::ResolverPolicy{});
    auto utts = catalog::extract_utterances(w.record);
    auto remote_tree = explorer::explore_skill(w.record, utts, client);
    auto local_tree = explorer::explore_skill(w.record, utts, local);

    REQUIRE(remote_tree.nodes.size() == local_tree.nodes.size());
    for (std::size_t i = 0; i < remote_tree.nodes.size(); ++i) {
      CHECK(remote_tree.nodes[i].text == local_tree.nodes[i].text);
      CHECK(remote_tree.nodes[i].depth == local_tree.nodes[i].depth);
      CHECK(remote_tree.nodes[i].parent == local_tree.nodes[i].parent);
      REQUIRE(remote_tree.nodes[i].edges.size() ==
              local_tree.nodes[i].edges.size());
      for (std::size_t k = 0; k < remote_tree.nodes[i].edges.size(); ++k) {
        CHECK(remote_tree.nodes[i].edges[k].utterance ==
              local_tree.nodes[i].edges[k].utterance);
        CHECK(remote_tree.nodes[i].edges[k].child ==
              local_tree.nodes[i].edges[k].child);
      }
    }
    REQUIRE(remote_tree.runs.size() == local_tree.runs.size());
    for (std::size_t i = 0; i < remote_tree.runs.size(); ++i) {
      CHECK(remote_tree.runs[i].path == local_tree.runs[i].path);
      CHECK(remote_tree.runs[i].utterances == local_tree.runs[i].utterances);
      CHECK(remote_tree.runs[i].end_reason == local_tree.runs[i].end_reason);
    }
    CHECK_FALSE(remote_tree.error.has_value());
  }
  server.stop();
}

TEST_CASE("protocol errors cross the wire with their codes") {
  Walkthrough w;
  wire::HostServer server(w.host);
  server.start();
  {
    wire::WireClient client("127.0.0.1", server.port());
    try {
      client.say("bogus-session", "hello");
      FAIL("expected a protocol error");
    } catch (const host::ProtocolError& e) {
      CHECK(e.code() == "unknown_session");
    }
    auto sid = client.open_session();
    try {
      client.set_skill_enabled(sid, "ghost.skill", true);
      FAIL("expected a protocol error");
    } catch (const host::ProtocolError& e) {
      CHECK(e.code() == "unknown_skill");
    }
    try {
      client.close_session("bogus-session");
      FAIL("expected a protocol error");
    } catch (const host::ProtocolError& e) {
      CHECK(e.code() == "unknown_session");
    }
    // the connection is still healthy after errors
    auto r = client.say(sid, "Open Skill X");
    CHECK(r.text == "Welcome to Skill X. Say 'Continue'.");
  }
  server.stop();
}

TEST_CASE("malformed frames get bad_request and the connection survives") {
  Walkthrough w;
  wire::HostServer server(w.host);
  server.start();
  {
    RawConn conn(server.port());

    conn.send_line("this is not json");
    auto resp = nlohmann::json::parse(conn.recv_line());
    CHECK(resp.at("ok").get<bool>() == false);
    CHECK(resp.at("error_code").get<std::string>() == "bad_request");

    conn.send_line(R"({"op":"frobnicate"})");
    resp = nlohmann::json::parse(conn.recv_line());
    CHECK(resp.at("ok").get<bool>() == false);
    CHECK(resp.at("error_code").get<std::string>() == "bad_request");

    conn.send_line(R"({"op":"say"})");
    resp = nlohmann::json::parse(conn.recv_line());
    CHECK(resp.at("ok").get<bool>() == false);

    conn.send_line(R"({"op":"open"})");
    resp = nlohmann::json::parse(conn.recv_line());
    CHECK(resp.at("ok").get<bool>() == true);
    REQUIRE(resp.contains("session"));
    std::string sid = resp.at("session").get<std::string>();

    conn.send_line(R"({"op":"say","session":")" + sid +
                   R"(","text":"Open Skill X"})");
    resp = nlohmann::json::parse(conn.recv_line());
    CHECK(resp.at("ok").get<bool>() == true);
    CHECK(resp.at("text").get<std::string>() ==
          "Welcome to Skill X. Say 'Continue'.");
    CHECK(resp.at("invoked_skill_id").get<std::string>() == "demo.skill-x");
  }
  server.stop();
}

TEST_CASE("concurrent clients hold independent sessions") {
  Walkthrough w;
  wire::HostServer server(w.host);
  server.start();
  {
    constexpr int kClients = 8;
    std::vector<std::thread> threads;
    std::vector<int> failures(kClients, 0);
    for (int i = 0; i < kClients; ++i) {
      threads.emplace_back([&, i] {
        wire::WireClient client("127.0.0.1", server.port());
        // The walkthrough ends on a terminal speech state, which leaves the
        // skill active in the session, so each round uses a fresh session.
        for (int round = 0; round < 10; ++round) {
          auto sid = client.open_session();
          auto r1 = client.say(sid, "Open Skill X");
          if (r1.text != "Welcome to Skill X. Say 'Continue'.") ++failures[i];
          auto r2 = client.say(sid, "continue");
          if (r2.text != "Great. Would you like to do A?") ++failures[i];
          auto r3 = client.say(sid, (i % 2) ? "yes" : "no");
          if (i % 2) {
            if (r3.text != "Enjoy activity A. It is lots of fun.") ++failures[i];
          } else {
            if (r3.text != "Ok, no A. Would you like activity B instead?")
              ++failures[i];
            auto r4 = client.say(sid, "yes");
            if (r4.text != "Enjoy activity B. Goodbye for now.") ++failures[i];
          }
          client.close_session(sid);
        }
      });
    }
    for (auto& t : threads) t.join();
    for (int i = 0; i < kClients; ++i) CHECK(failures[i] == 0);
  }
  server.stop();
}

TEST_CASE("stopping the server is idempotent and frees the port") {
  Walkthrough w;
  auto* server = new wire::HostServer(w.host);
  server->start();
  auto port = server->port();
  server->stop();
  server->stop();
  delete server;

  // the port can be bound again immediately
  wire::HostServer second(w.host, port);
  second.start();
  CHECK(second.port() == port);
  second.stop();
}
