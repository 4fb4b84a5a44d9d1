#include "tabletop/server.hpp"

#include <chrono>
#include <csignal>
#include <deque>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace tabletop {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const ServerOptions& options)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        period_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / options.tick_hz))),
        session_(options.session) {}

  void start() {
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->read();
      self->next_tick_ = std::chrono::steady_clock::now() + self->period_;
      self->schedule();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    session_.disconnect();
    beast::error_code ec;
    ws_.next_layer().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      for (auto& m : self->session_.handle(text)) self->send(m.dump());
      self->read();
    });
  }

  void schedule() {
    if (closed_) return;
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      for (auto& m : self->session_.tick()) self->send(m.dump());
      self->next_tick_ += self->period_;
      self->schedule();
    });
  }

  void send(std::string text) {
    if (closed_) return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write();
    });
  }

  websocket::stream<tcp::socket> ws_;
  asio::steady_timer timer_;
  std::chrono::steady_clock::duration period_;
  std::chrono::steady_clock::time_point next_tick_;
  LiveSession session_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool closed_ = false;
};

}  // namespace

struct SessionServer::Impl {
  ServerOptions options;
  asio::io_context io{1};
  tcp::acceptor acceptor{io};
  std::thread thread;
  std::vector<std::weak_ptr<Connection>> connections;
  unsigned short port = 0;

  explicit Impl(ServerOptions o) : options(std::move(o)) {
    if (!(options.tick_hz > 0.0)) throw std::invalid_argument("tick_hz must be positive");
    // Fail early on bad session settings rather than on the first connection.
    LiveSession probe(options.session);
    const tcp::endpoint endpoint(asio::ip::make_address(options.address), options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
    port = acceptor.local_endpoint().port();
    accept();
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto c = std::make_shared<Connection>(std::move(socket), options);
      connections.push_back(c);
      c->start();
      accept();
    });
  }

  void shutdown() {
    beast::error_code ec;
    acceptor.close(ec);
    for (auto& w : connections) {
      if (auto c = w.lock()) c->close();
    }
    connections.clear();
  }
};

SessionServer::SessionServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

SessionServer::~SessionServer() { stop(); }

unsigned short SessionServer::port() const { return impl_->port; }

void SessionServer::run() {
  // Ctrl-C or SIGTERM closes the sessions so running trials flush their logs.
  asio::signal_set signals(impl_->io, SIGINT, SIGTERM);
  signals.async_wait([impl = impl_.get()](beast::error_code ec, int) {
    if (ec) return;
    impl->shutdown();
    impl->io.stop();
  });
  impl_->io.run();
}

void SessionServer::start() {
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void SessionServer::stop() {
  if (!impl_) return;
  asio::post(impl_->io, [impl = impl_.get()] {
    impl->shutdown();
    impl->io.stop();
  });
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace tabletop
