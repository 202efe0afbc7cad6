#pragma once

#include <string>
#include <vector>

#include "forge/consistency.hpp"
#include "forge/error.hpp"

namespace forge {

class SidecarError : public StageError {
 public:
  explicit SidecarError(const std::string& what) : StageError("sidecar", what) {}
};

struct SidecarOptions {
  std::string command;  // run via /bin/sh -c
  std::size_t batch_size = 64;
  int timeout_ms = 30000;  // per read wait
};

// Client for the scorer child process. Newline-delimited JSON over the
// child's stdin/stdout:
//   -> {"op":"hello","proto":1}            <- {"ok":true,"proto":1}
//   -> {"id":N,"op":"score","code":..,"docstring":..,"lang":..}
//   <- {"id":N,"score":F}   (any order)
// Requests of one batch are pipelined; responses are matched by id.
class SidecarClient {
 public:
  explicit SidecarClient(SidecarOptions options);
  ~SidecarClient();
  SidecarClient(const SidecarClient&) = delete;
  SidecarClient& operator=(const SidecarClient&) = delete;

  // Spawns the child and performs the handshake. Throws SidecarError.
  void start();
  bool running() const { return pid_ > 0; }

  // Scores in request order. Throws SidecarError on timeout, child exit,
  // malformed or duplicate responses, or scores outside [0,1].
  std::vector<double> score(const std::vector<ScoreRequest>& requests);

  // Closes stdin and reaps the child.
  void stop();

 private:
  std::vector<double> score_chunk(const std::vector<ScoreRequest>& requests,
                                  std::size_t begin, std::size_t end);
  void send_all(const std::string& data);
  std::string read_line();
  void pump(int wait_ms);

  SidecarOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string inbox_;
  long long next_id_ = 1;
};

// Scorer backed by the sidecar. With fail_open, an unreachable sidecar keeps
// every sample (score 1.0, marked) instead of failing the stage.
class SidecarScorer : public Scorer {
 public:
  SidecarScorer(SidecarOptions options, bool fail_open);
  ScoreBackend backend() const override { return ScoreBackend::kSidecar; }
  std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
  bool degraded() const { return degraded_; }
  const std::string& last_error() const { return last_error_; }

 private:
  SidecarClient client_;
  bool fail_open_;
  bool degraded_ = false;
  std::string last_error_;
};

}  // namespace forge
