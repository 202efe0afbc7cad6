#include "forge/sidecar.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <map>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace forge {
namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

SidecarClient::SidecarClient(SidecarOptions options) : options_(std::move(options)) {
  if (options_.batch_size == 0) options_.batch_size = 1;
}

SidecarClient::~SidecarClient() {
  try {
    stop();
  } catch (...) {
  }
}

void SidecarClient::start() {
  if (running()) return;
  if (options_.command.empty()) throw SidecarError("no sidecar command configured");
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw SidecarError(std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw SidecarError(std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw SidecarError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], 0);
    ::dup2(out_pipe[1], 1);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFL, ::fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  ::fcntl(from_child_, F_SETFL, ::fcntl(from_child_, F_GETFL) | O_NONBLOCK);
  ::signal(SIGPIPE, SIG_IGN);

  try {
    send_all(nlohmann::json{{"op", "hello"}, {"proto", 1}}.dump() + "\n");
    const auto line = read_line();
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("ok", false) != true ||
        j.value("proto", 0) != 1)
      throw SidecarError("bad handshake reply: " + line);
  } catch (...) {
    stop();
    throw;
  }
}

void SidecarClient::stop() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0) {
    int status = 0;
    // Give the child a moment to exit on EOF before forcing it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        break;
      }
      ::usleep(10000);
    }
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }
  inbox_.clear();
}

// Reads whatever is available into the inbox, waiting up to wait_ms.
void SidecarClient::pump(int wait_ms) {
  pollfd p{from_child_, POLLIN, 0};
  const int r = ::poll(&p, 1, wait_ms);
  if (r < 0 && errno != EINTR) throw SidecarError(std::string("poll: ") + std::strerror(errno));
  if (r <= 0) return;
  char buf[65536];
  while (true) {
    const auto n = ::read(from_child_, buf, sizeof buf);
    if (n > 0) {
      inbox_.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n == 0) throw SidecarError("sidecar closed its output");
    if (errno == EAGAIN || errno == EWOULDBLOCK) return;
    if (errno == EINTR) continue;
    throw SidecarError(std::string("read: ") + std::strerror(errno));
  }
}

std::string SidecarClient::read_line() {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::milliseconds(options_.timeout_ms);
  while (true) {
    const auto nl = inbox_.find('\n');
    if (nl != std::string::npos) {
      std::string line = inbox_.substr(0, nl);
      inbox_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - clock::now()).count();
    if (left <= 0) throw SidecarError("timed out waiting for a response");
    pump(static_cast<int>(left));
  }
}

// Writes while draining replies, so a child that answers early cannot
// deadlock on a full pipe. Complete reply lines stay in the inbox.
void SidecarClient::send_all(const std::string& data) {
  using clock = std::chrono::steady_clock;
  std::size_t off = 0;
  auto deadline = clock::now() + std::chrono::milliseconds(options_.timeout_ms);
  while (off < data.size()) {
    pollfd fds[2] = {{to_child_, POLLOUT, 0}, {from_child_, POLLIN, 0}};
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - clock::now()).count();
    if (left <= 0) throw SidecarError("timed out writing requests");
    const int r = ::poll(fds, 2, static_cast<int>(left));
    if (r < 0 && errno != EINTR) throw SidecarError(std::string("poll: ") + std::strerror(errno));
    if (r <= 0) continue;
    if (fds[1].revents & (POLLIN | POLLHUP)) pump(0);
    if (fds[0].revents & (POLLERR | POLLHUP)) throw SidecarError("sidecar closed its input");
    if (fds[0].revents & POLLOUT) {
      const auto n = ::write(to_child_, data.data() + off, data.size() - off);
      if (n > 0) {
        off += static_cast<std::size_t>(n);
        deadline = clock::now() + std::chrono::milliseconds(options_.timeout_ms);
      } else if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
        throw SidecarError(std::string("write: ") + std::strerror(errno));
      }
    }
  }
}

std::vector<double> SidecarClient::score_chunk(const std::vector<ScoreRequest>& requests,
                                               std::size_t begin, std::size_t end) {
  std::map<long long, std::size_t> pending;
  std::string payload;
  for (std::size_t i = begin; i < end; ++i) {
    const long long id = next_id_++;
    pending[id] = i - begin;
    nlohmann::json j = {{"id", id},
                        {"op", "score"},
                        {"code", requests[i].code},
                        {"docstring", requests[i].docstring},
                        {"lang", std::string(language_name(requests[i].language))}};
    payload += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    payload += '\n';
  }
  send_all(payload);
  std::vector<double> out(end - begin, 0.0);
  while (!pending.empty()) {
    const auto line = read_line();
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw SidecarError("malformed response: " + line);
    if (j.contains("error"))
      throw SidecarError("sidecar error: " + j["error"].dump());
    if (!j.contains("id") || !j["id"].is_number_integer())
      throw SidecarError("response without id: " + line);
    const auto id = j["id"].get<long long>();
    const auto it = pending.find(id);
    if (it == pending.end())
      throw SidecarError("unexpected or duplicate response id " + std::to_string(id));
    if (!j.contains("score") || !j["score"].is_number())
      throw SidecarError("response without score: " + line);
    const double s = j["score"].get<double>();
    if (!(s >= 0.0 && s <= 1.0)) throw SidecarError("score outside [0,1]: " + line);
    out[it->second] = s;
    pending.erase(it);
  }
  return out;
}

std::vector<double> SidecarClient::score(const std::vector<ScoreRequest>& requests) {
  if (!running()) start();
  std::vector<double> out;
  out.reserve(requests.size());
  for (std::size_t b = 0; b < requests.size(); b += options_.batch_size) {
    const auto e = std::min(requests.size(), b + options_.batch_size);
    auto part = score_chunk(requests, b, e);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

SidecarScorer::SidecarScorer(SidecarOptions options, bool fail_open)
    : client_(std::move(options)), fail_open_(fail_open) {}

std::vector<double> SidecarScorer::score_batch(const std::vector<ScoreRequest>& batch) {
  if (degraded_) return std::vector<double>(batch.size(), 1.0);
  try {
    return client_.score(batch);
  } catch (const SidecarError& e) {
    if (!fail_open_) throw;
    degraded_ = true;
    last_error_ = e.what();
    client_.stop();
    return std::vector<double>(batch.size(), 1.0);
  }
}

}  // namespace forge
