#pragma once

#include <coupled/io.hpp>

#include <atomic>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

/// Request/response protocol used by the explorer.
///
/// Every message is framed as
///
///     <decimal byte count of the JSON envelope>\n<JSON envelope>[payload]
///
/// Requests never carry a payload. A response whose envelope has a non-zero
/// "payload_bytes" is followed by exactly that many raw bytes; for renders
/// these are the 8-bit grayscale pixels, row-major, row 0 on top, with
/// "width" and "height" in the envelope.
///
/// Request envelope keys:
///   "op"         "render" | "cycle" | "stability" | "ping"   (required)
///   "id"         any JSON value, echoed back
///   "config"     run configuration object (same schema as config files)
///   "enlargement" odd cycle-point size for renders (default 5)
///   "stability"  {"seeds": [...], "dilation": 1, "threshold": 0.95, "jobs": 0}
///
/// Responses always carry "ok". Failures look like
///   {"ok": false, "error": {"kind": "...", "message": "...", "violations": [...]}}
/// and leave the connection usable.
namespace coupled::serve {

struct Message {
  std::string envelope;
  std::string payload;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Stateless request handler with a cache of results keyed by the request
/// contents (minus "id"). Safe to call from several threads.
class Engine {
 public:
  Message handle(std::string_view request);

  std::size_t cache_size() const;
  std::uint64_t cache_hits() const { return hits_; }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Message> cache_;
  std::atomic<std::uint64_t> hits_{0};
};

std::string frame(const Message& message);

/// Byte source abstraction for the framing reader.
class Reader {
 public:
  virtual ~Reader() = default;
  /// Reads up to and excluding '\n'. Returns nullopt at end of stream.
  virtual std::optional<std::string> read_line(std::size_t limit) = 0;
  /// Reads exactly n bytes; nullopt on premature end of stream.
  virtual std::optional<std::string> read_exact(std::size_t n) = 0;
};

class StreamReader : public Reader {
 public:
  explicit StreamReader(std::istream& in) : in_(in) {}
  std::optional<std::string> read_line(std::size_t limit) override;
  std::optional<std::string> read_exact(std::size_t n) override;

 private:
  std::istream& in_;
};

/// Handles framed requests until end of input. Returns the number of requests answered.
std::size_t serve_connection(Engine& engine, Reader& in, const std::function<void(std::string_view)>& write);

std::size_t serve_stream(Engine& engine, std::istream& in, std::ostream& out);

/// Listens on 127.0.0.1. One thread per connection, requests on a connection
/// are answered in order.
class TcpServer {
 public:
  /// Binds immediately; port 0 picks a free port. Throws std::runtime_error if
  /// the endpoint is unavailable.
  TcpServer(Engine& engine, std::uint16_t port);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }

  /// Accepts connections until stop() is called.
  void run();
  void stop();

 private:
  Engine& engine_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex workers_mutex_;
  std::vector<std::jthread> workers_;
  std::vector<int> client_fds_;
};

/// Client side of the framing, used by tests and tooling.
std::optional<Message> read_message(Reader& in);

}  // namespace coupled::serve
