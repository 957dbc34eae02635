// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qsynth/generation.hpp"
#include "qsynth/scoring.hpp"

namespace qsynth::wire {

// Newline-delimited JSON, one request and one response per line:
//   {"op":"fill","tokens":[...],"masked_positions":[...],"k":K}
//     -> {"candidates":[[{"token":T,"score":S},...],...]}
//   {"op":"embed","texts":[...]}
//     -> {"vectors":[[...],...]}
//   any failure -> {"error":MESSAGE}

/// A bidirectional line transport. One request is in flight at a time.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  /// Sends `line` (without its terminator) and returns the next response line.
  virtual std::string exchange(const std::string& line) = 0;
};

/// Spawns `/bin/sh -c command` and talks over its stdin/stdout.
class SubprocessChannel final : public LineChannel {
 public:
  explicit SubprocessChannel(const std::string& command,
                             std::chrono::milliseconds timeout = std::chrono::seconds(120));
  ~SubprocessChannel() override;
  SubprocessChannel(const SubprocessChannel&) = delete;
  SubprocessChannel& operator=(const SubprocessChannel&) = delete;

  std::string exchange(const std::string& line) override;

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::chrono::milliseconds timeout_;
};

class TcpChannel final : public LineChannel {
 public:
  TcpChannel(const std::string& host, int port, std::chrono::milliseconds timeout = std::chrono::seconds(120));
  ~TcpChannel() override;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  std::string exchange(const std::string& line) override;

 private:
  int fd_ = -1;
  std::string buffer_;
  std::chrono::milliseconds timeout_;
};

/// Opens "tcp://host:port" or "exec:<command>". Throws ConfigError on an
/// unrecognised endpoint and BackendError when the connection fails.
std::unique_ptr<LineChannel> open_endpoint(const std::string& endpoint);

nlohmann::json fill_request(const MaskedSequence& seq, std::size_t k);
nlohmann::json embed_request(const std::vector<std::string>& texts);

/// Decodes a fill response. Positions with fewer than k candidates are
/// padded with their last candidate and flagged; other shape violations
/// and error responses throw BackendError.
FillResult parse_fill_response(const nlohmann::json& response, std::size_t positions, std::size_t k);

/// Throws BackendError on an error response, a count mismatch or ragged vectors.
std::vector<Embedding> parse_embed_response(const nlohmann::json& response, std::size_t texts);

/// Serialises access to one channel so the backends below can be shared
/// across worker threads.
class Client {
 public:
  explicit Client(std::unique_ptr<LineChannel> channel) : channel_(std::move(channel)) {}

  nlohmann::json call(const nlohmann::json& request) const;

 private:
  mutable std::mutex mutex_;
  std::unique_ptr<LineChannel> channel_;
};

class RemoteFillBackend final : public FillBackend {
 public:
  explicit RemoteFillBackend(std::shared_ptr<Client> client) : client_(std::move(client)) {}
  FillResult fill(const MaskedSequence& seq, std::size_t k) const override;

 private:
  std::shared_ptr<Client> client_;
};

class RemoteEmbedBackend final : public EmbedBackend {
 public:
  explicit RemoteEmbedBackend(std::shared_ptr<Client> client) : client_(std::move(client)) {}
  std::vector<Embedding> embed(const std::vector<std::string>& texts) const override;

 private:
  std::shared_ptr<Client> client_;
};

}  // namespace qsynth::wire
