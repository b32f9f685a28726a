#include <coupled/serve.hpp>

#include <coupled/run.hpp>

#include "json_codec.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace coupled::serve {

namespace {

constexpr std::size_t max_envelope_bytes = 1 << 20;
constexpr std::size_t max_length_digits = 20;

RunConfigDocument serve_defaults() {
  RunConfigDocument doc;
  doc.width = 400;
  doc.height = 400;
  return doc;
}

Message error_message(std::string_view kind, const std::string& text, const std::vector<std::string>& violations = {}) {
  json err{{"kind", kind}, {"message", text}};
  if (!violations.empty()) err["violations"] = violations;
  return {json{{"ok", false}, {"error", err}}.dump(), {}};
}

RunConfigDocument request_config(ObjectReader& r) {
  if (!r.has("config")) return serve_defaults();
  return config_from_json(r.raw("config"), serve_defaults());
}

Message compute(const json& request) {
  ObjectReader r(request, "");
  r.has("id");
  const std::string op = r.string("op");

  if (op == "ping") {
    r.finish();
    return {json{{"ok", true}, {"op", op}}.dump(), {}};
  }

  if (op == "render") {
    const RunConfigDocument doc = request_config(r);
    std::size_t enlargement = default_enlargement;
    if (r.has("enlargement")) enlargement = r.unsigned_integer("enlargement");
    r.finish();
    RenderOutcome out = render_document(doc, enlargement);
    json body{{"ok", true},
              {"op", op},
              {"width", out.image.width},
              {"height", out.image.height},
              {"payload_bytes", out.image.pixels.size()},
              {"total_count", out.raster.total()},
              {"max_count", out.raster.max_count()},
              {"cycle", cycle_json(out.cycle ? &*out.cycle : nullptr)},
              {"resolved", config_to_json(doc)}};
    return {body.dump(), std::string(out.image.pixels.begin(), out.image.pixels.end())};
  }

  if (op == "cycle") {
    const RunConfigDocument doc = request_config(r);
    r.finish();
    const auto report = detect_cycle(doc.system, doc.initial(), doc.n_burn, doc.cycle);
    json body{{"ok", true},
              {"op", op},
              {"cycle", cycle_json(report ? &*report : nullptr)},
              {"resolved", config_to_json(doc)}};
    return {body.dump(), {}};
  }

  if (op == "stability") {
    const RunConfigDocument doc = request_config(r);
    StabilityOptions options;
    options.render = doc.render_settings();
    if (r.has("stability")) {
      ObjectReader s = r.object("stability");
      if (s.has("seeds")) {
        const json& seeds = s.raw("seeds");
        if (!seeds.is_array()) throw ParseError("stability.seeds", "expected an array");
        options.seeds.clear();
        for (const json& v : seeds) {
          if (!v.is_number_unsigned()) throw ParseError("stability.seeds", "expected non-negative integers");
          options.seeds.push_back(v.get<std::uint64_t>());
        }
      }
      if (s.has("dilation")) options.dilation = s.unsigned_integer("dilation");
      if (s.has("threshold")) options.threshold = s.real("threshold");
      if (s.has("jobs")) options.jobs = static_cast<unsigned>(s.unsigned_integer("jobs"));
      s.finish();
    }
    r.finish();
    json body = stability_json(stability_check(doc.system, options));
    body["ok"] = true;
    body["op"] = op;
    body["resolved"] = config_to_json(doc);
    return {body.dump(), {}};
  }

  throw ParseError("op", "unknown operation '" + op + "'");
}

Message with_id(const Message& message, const json* id) {
  if (id == nullptr) return message;
  json envelope = json::parse(message.envelope);
  envelope["id"] = *id;
  return {envelope.dump(), message.payload};
}

}  // namespace

Message Engine::handle(std::string_view request) {
  json parsed;
  try {
    parsed = parse_json(request, "request");
  } catch (const ParseError& e) {
    return error_message("parse", e.what());
  }
  if (!parsed.is_object()) return error_message("parse", "request must be a JSON object");

  const json* id = parsed.contains("id") ? &parsed.at("id") : nullptr;
  json keyed = parsed;
  keyed.erase("id");
  const std::string key = keyed.dump();

  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return with_id(it->second, id);
    }
  }

  Message result;
  try {
    result = compute(parsed);
  } catch (const ConstraintError& e) {
    return with_id(error_message("constraint", e.what(), e.violations()), id);
  } catch (const ParseError& e) {
    return with_id(error_message("request", e.what()), id);
  } catch (const std::exception& e) {
    return with_id(error_message("invalid", e.what()), id);
  }

  {
    std::lock_guard lock(mutex_);
    cache_.emplace(key, result);
  }
  return with_id(result, id);
}

std::size_t Engine::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::string frame(const Message& message) {
  std::string out = std::to_string(message.envelope.size());
  out += '\n';
  out += message.envelope;
  out += message.payload;
  return out;
}

std::optional<std::string> StreamReader::read_line(std::size_t limit) {
  std::string line;
  char c = 0;
  while (in_.get(c)) {
    if (c == '\n') return line;
    if (line.size() < limit) line.push_back(c);
  }
  if (line.empty()) return std::nullopt;
  return line;
}

std::optional<std::string> StreamReader::read_exact(std::size_t n) {
  std::string out(n, '\0');
  in_.read(out.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) return std::nullopt;
  return out;
}

namespace {

std::optional<std::size_t> parse_length(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty() || line.size() > max_length_digits) return std::nullopt;
  std::size_t n = 0;
  for (char c : line) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + static_cast<std::size_t>(c - '0');
  }
  return n;
}

}  // namespace

std::optional<Message> read_message(Reader& in) {
  for (;;) {
    auto line = in.read_line(max_length_digits + 2);
    if (!line) return std::nullopt;
    if (line->empty()) continue;
    const auto length = parse_length(*line);
    if (!length) throw std::runtime_error("bad frame length '" + *line + "'");
    auto envelope = in.read_exact(*length);
    if (!envelope) return std::nullopt;
    Message m{std::move(*envelope), {}};
    const json parsed = json::parse(m.envelope);
    const std::size_t payload = parsed.value("payload_bytes", std::size_t{0});
    if (payload > 0) {
      auto bytes = in.read_exact(payload);
      if (!bytes) return std::nullopt;
      m.payload = std::move(*bytes);
    }
    return m;
  }
}

std::size_t serve_connection(Engine& engine, Reader& in, const std::function<void(std::string_view)>& write) {
  std::size_t answered = 0;
  for (;;) {
    auto line = in.read_line(max_length_digits + 2);
    if (!line) break;
    if (line->empty() || *line == "\r") continue;
    const auto length = parse_length(*line);
    if (!length || *length > max_envelope_bytes) {
      // Resynchronise on the next line.
      write(frame(error_message("framing", "expected a decimal envelope length line")));
      ++answered;
      continue;
    }
    auto body = in.read_exact(*length);
    if (!body) break;
    write(frame(engine.handle(*body)));
    ++answered;
  }
  return answered;
}

std::size_t serve_stream(Engine& engine, std::istream& in, std::ostream& out) {
  StreamReader reader(in);
  return serve_connection(engine, reader, [&](std::string_view bytes) {
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
  });
}

// TCP --------------------------------------------------------------------------

namespace {

class SocketReader : public Reader {
 public:
  explicit SocketReader(int fd) : fd_(fd) {}

  std::optional<std::string> read_line(std::size_t limit) override {
    std::string line;
    for (;;) {
      const auto c = next();
      if (!c) return line.empty() ? std::nullopt : std::optional(line);
      if (*c == '\n') return line;
      if (line.size() < limit) line.push_back(*c);
    }
  }

  std::optional<std::string> read_exact(std::size_t n) override {
    std::string out;
    out.reserve(n);
    while (out.size() < n) {
      if (pos_ == buffer_.size() && !fill()) return std::nullopt;
      const std::size_t take = std::min(n - out.size(), buffer_.size() - pos_);
      out.append(buffer_, pos_, take);
      pos_ += take;
    }
    return out;
  }

 private:
  std::optional<char> next() {
    if (pos_ == buffer_.size() && !fill()) return std::nullopt;
    return buffer_[pos_++];
  }
  bool fill() {
    char chunk[4096];
    ssize_t got = 0;
    do {
      got = ::recv(fd_, chunk, sizeof chunk, 0);
    } while (got < 0 && errno == EINTR);
    if (got <= 0) return false;
    buffer_.assign(chunk, static_cast<std::size_t>(got));
    pos_ = 0;
    return true;
  }

  int fd_;
  std::string buffer_;
  std::size_t pos_ = 0;
};

void send_all(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t sent = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (sent < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("send failed: ") + std::strerror(errno));
    }
    bytes.remove_prefix(static_cast<std::size_t>(sent));
  }
}

}  // namespace

TcpServer::TcpServer(Engine& engine, std::uint16_t port) : engine_(engine) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string cause = std::strerror(errno);
    ::close(listen_fd_);
    throw std::runtime_error("cannot listen on 127.0.0.1:" + std::to_string(port) + ": " + cause);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  stop();
  {
    std::lock_guard lock(workers_mutex_);
    workers_.clear();  // joins
    for (int fd : client_fds_) ::close(fd);
  }
  ::close(listen_fd_);
}

void TcpServer::run() {
  while (!stopping_) {
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) {
      if (errno == EINTR && !stopping_) continue;
      break;
    }
    std::lock_guard lock(workers_mutex_);
    if (stopping_) {
      ::close(client);
      break;
    }
    client_fds_.push_back(client);
    workers_.emplace_back([this, client] {
      SocketReader reader(client);
      try {
        serve_connection(engine_, reader, [client](std::string_view bytes) { send_all(client, bytes); });
      } catch (const std::exception&) {
        // peer went away mid-response
      }
      ::shutdown(client, SHUT_RDWR);
    });
  }
}

void TcpServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard lock(workers_mutex_);
  for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
}

}  // namespace coupled::serve
