// SPDX-License-Identifier: Apache-2.0
#include "qsynth/wire.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "qsynth/error.hpp"

namespace qsynth::wire {

namespace {

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

void write_all(int fd, const std::string& data, bool socket) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = socket ? ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL)
                             : ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError(sys_error("write to backend failed"));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string read_line(int fd, std::string& buffer, std::chrono::milliseconds timeout) {
  for (;;) {
    if (const auto nl = buffer.find('\n'); nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw BackendError(sys_error("poll on backend failed"));
    }
    if (ready == 0) throw BackendError("backend did not answer within " + std::to_string(timeout.count()) + " ms");
    char chunk[65536];
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError(sys_error("read from backend failed"));
    }
    if (n == 0) throw BackendError("backend closed the connection");
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

void throw_if_error(const nlohmann::json& response) {
  if (!response.is_object()) throw BackendError("backend response is not a JSON object");
  if (const auto it = response.find("error"); it != response.end())
    throw BackendError("backend error: " + (it->is_string() ? it->get<std::string>() : it->dump()));
}

}  // namespace

SubprocessChannel::SubprocessChannel(const std::string& command, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0) throw BackendError(sys_error("pipe"));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BackendError(sys_error("pipe"));
  }
  pid_ = ::fork();
  if (pid_ < 0) throw BackendError(sys_error("fork"));
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
}

SubprocessChannel::~SubprocessChannel() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

std::string SubprocessChannel::exchange(const std::string& line) {
  write_all(to_child_, line + "\n", false);
  return read_line(from_child_, buffer_, timeout_);
}

TcpChannel::TcpChannel(const std::string& host, int port, std::chrono::milliseconds timeout) : timeout_(timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found); rc != 0)
    throw BackendError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  for (addrinfo* a = found; a; a = a->ai_next) {
    fd_ = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(found);
  if (fd_ < 0) throw BackendError("cannot connect to " + host + ":" + std::to_string(port));
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

std::string TcpChannel::exchange(const std::string& line) {
  write_all(fd_, line + "\n", true);
  return read_line(fd_, buffer_, timeout_);
}

std::unique_ptr<LineChannel> open_endpoint(const std::string& endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) {
    const std::string command = endpoint.substr(5);
    if (command.empty()) throw ConfigError("endpoint 'exec:' needs a command");
    return std::make_unique<SubprocessChannel>(command);
  }
  if (endpoint.rfind("tcp://", 0) == 0) {
    const std::string rest = endpoint.substr(6);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0) throw ConfigError("endpoint must look like tcp://host:port");
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("invalid port in endpoint '" + endpoint + "'");
    }
    if (port <= 0 || port > 65535) throw ConfigError("invalid port in endpoint '" + endpoint + "'");
    return std::make_unique<TcpChannel>(rest.substr(0, colon), port);
  }
  throw ConfigError("unrecognised endpoint '" + endpoint + "' (expected tcp://host:port or exec:<command>)");
}

nlohmann::json fill_request(const MaskedSequence& seq, std::size_t k) {
  return nlohmann::json{{"op", "fill"}, {"tokens", seq.tokens}, {"masked_positions", seq.masked_positions}, {"k", k}};
}

nlohmann::json embed_request(const std::vector<std::string>& texts) {
  return nlohmann::json{{"op", "embed"}, {"texts", texts}};
}

FillResult parse_fill_response(const nlohmann::json& response, std::size_t positions, std::size_t k) {
  throw_if_error(response);
  const auto it = response.find("candidates");
  if (it == response.end() || !it->is_array()) throw BackendError("fill response lacks a 'candidates' array");
  if (it->size() != positions)
    throw BackendError("fill response has " + std::to_string(it->size()) + " positions, expected " +
                       std::to_string(positions));
  FillResult result;
  for (const auto& list : *it) {
    if (!list.is_array() || list.empty()) throw BackendError("fill response position has no candidates");
    if (list.size() > k)
      throw BackendError("fill response has " + std::to_string(list.size()) + " candidates, expected " +
                         std::to_string(k));
    std::vector<Candidate> ranked;
    for (const auto& c : list) {
      if (!c.is_object() || !c.contains("token") || !c["token"].is_string() || !c.contains("score") ||
          !c["score"].is_number())
        throw BackendError("malformed fill candidate: " + c.dump());
      ranked.push_back({c["token"].get<std::string>(), c["score"].get<double>()});
    }
    if (ranked.size() < k) {
      result.padded = true;
      ranked.resize(k, ranked.back());
    }
    result.positions.push_back(std::move(ranked));
  }
  return result;
}

std::vector<Embedding> parse_embed_response(const nlohmann::json& response, std::size_t texts) {
  throw_if_error(response);
  const auto it = response.find("vectors");
  if (it == response.end() || !it->is_array()) throw BackendError("embed response lacks a 'vectors' array");
  if (it->size() != texts)
    throw BackendError("embed response has " + std::to_string(it->size()) + " vectors, expected " +
                       std::to_string(texts));
  std::vector<Embedding> out;
  for (const auto& v : *it) {
    if (!v.is_array() || v.empty()) throw BackendError("embed response holds an empty or non-array vector");
    Embedding e;
    e.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) throw BackendError("embed response holds a non-numeric component");
      e.push_back(x.get<double>());
    }
    if (!out.empty() && e.size() != out.front().size()) throw BackendError("embed response vectors differ in dimension");
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json Client::call(const nlohmann::json& request) const {
  std::string line;
  {
    std::lock_guard lock(mutex_);
    line = channel_->exchange(request.dump());
  }
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw BackendError("backend sent malformed JSON: " + line.substr(0, 200));
  }
}

FillResult RemoteFillBackend::fill(const MaskedSequence& seq, std::size_t k) const {
  return parse_fill_response(client_->call(fill_request(seq, k)), seq.masked_positions.size(), k);
}

std::vector<Embedding> RemoteEmbedBackend::embed(const std::vector<std::string>& texts) const {
  return parse_embed_response(client_->call(embed_request(texts)), texts.size());
}

}  // namespace qsynth::wire
