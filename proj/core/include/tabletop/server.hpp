#pragma once

#include <memory>
#include <string>

#include "tabletop/session.hpp"

namespace tabletop {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 binds an ephemeral port
  double tick_hz = 20.0;    // wall-clock pacing of simulated ticks
  SessionSettings session;
};

// WebSocket endpoint. Every connection gets its own LiveSession, driven by
// one timer on the server's I/O thread, so a session's inputs and ticks are
// serialized. Disconnecting aborts the trial and flushes its partial log.
class SessionServer {
 public:
  explicit SessionServer(ServerOptions options);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  unsigned short port() const;

  // Serves until stop() is called.
  void run();
  // Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tabletop
