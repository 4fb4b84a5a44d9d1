#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "tabletop/server.hpp"

using namespace tabletop;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace fs = std::filesystem;

namespace {

class Client {
 public:
  explicit Client(unsigned short port) : ws_(io_) {
    asio::ip::tcp::resolver resolver(io_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }

  void send(const nlohmann::json& j) { ws_.write(asio::buffer(j.dump())); }

  nlohmann::json receive() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return nlohmann::json::parse(beast::buffers_to_string(buffer.data()));
  }

  // Next message of the given kind, skipping others.
  nlohmann::json receive(const std::string& kind) {
    for (;;) {
      auto m = receive();
      if (m["kind"] == kind) return m;
    }
  }

  void close() { ws_.close(websocket::close_code::normal); }

 private:
  asio::io_context io_;
  websocket::stream<asio::ip::tcp::socket> ws_;
};

}  // namespace

TEST_CASE("a WebSocket client plays a fixed-territory session") {
  const fs::path dir = fs::temp_directory_path() / "tabletop_test_server";
  fs::remove_all(dir);
  ServerOptions options;
  options.tick_hz = 200.0;
  options.session.technique = PolicyKind::fixed;
  options.session.seed = 3;
  options.session.log_dir = dir;
  SessionServer server(options);
  REQUIRE(server.port() != 0);
  server.start();

  {
    Client client(server.port());
    client.send({{"kind", "hello"}});
    const auto hello = client.receive();
    CHECK(hello["kind"] == "hello");
    CHECK(hello["defaults"]["technique"] == "fixed");

    client.send({{"kind", "start_trial"}});
    const auto started = client.receive("start_trial");
    CHECK(started["scenario"]["blocks"].size() == 16);
    const auto full = client.receive("state_diff");
    CHECK(full["full"] == true);

    BlockId block = 0;
    Position from;
    for (const auto& b : full["blocks"]) {
      if (b["position"]["y"].get<double>() < 0.6) {
        block = b["id"].get<int>();
        from = {b["position"]["x"].get<double>(), b["position"]["y"].get<double>()};
        break;
      }
    }
    REQUIRE(block != 0);

    client.send({{"kind", "input"},
                 {"input", {{"type", "menu"}, {"block", 42}, {"dwell_s", 1.0}, {"choice", "to_robot"}, {"seq", 1}}}});
    const auto error = client.receive("error");
    CHECK(error["seq"] == 1);
    CHECK(error["message"] == "unknown block 42");

    const nlohmann::json path = nlohmann::json::array(
        {{{"t", 0.0}, {"x", from.x}, {"y", from.y}}, {{"t", 0.4}, {"x", 0.5}, {"y", 0.8}}});
    client.send({{"kind", "input"}, {"input", {{"type", "drag"}, {"block", block}, {"path", path}, {"seq", 2}}}});

    // The diff that acks the input covers the tick it was applied at.
    std::optional<std::int64_t> applied;
    std::optional<std::int64_t> assigned;
    while (!assigned) {
      const auto diff = client.receive("state_diff");
      const auto& acked = diff["acked"];
      if (std::find(acked.begin(), acked.end(), 2) != acked.end()) applied = diff["tick"].get<std::int64_t>() - 1;
      const auto& a = diff["assignments"];
      if (a.contains(std::to_string(block)) && a[std::to_string(block)] == "robot") {
        assigned = diff["tick"].get<std::int64_t>();
      }
    }
    REQUIRE(applied);
    CHECK(*assigned - *applied <= 3);
    CHECK(*assigned >= *applied);
    client.close();
  }

  // The server aborts the trial on disconnect and flushes its log.
  bool flushed = false;
  for (int i = 0; i < 200 && !flushed; ++i) {
    flushed = fs::exists(dir) && !fs::is_empty(dir);
    if (!flushed) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(flushed);
  server.stop();
  fs::remove_all(dir);
}

TEST_CASE("bad server options are rejected up front") {
  ServerOptions options;
  options.tick_hz = 0.0;
  CHECK_THROWS(SessionServer(options));
  options.tick_hz = 20.0;
  options.session.ticks_per_diff = 0;
  CHECK_THROWS(SessionServer(options));
}
