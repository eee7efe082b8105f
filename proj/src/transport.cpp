#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <unordered_map>

#include "anticipate/backend.hpp"

namespace anticipate {

namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

}  // namespace

StreamBackend::StreamBackend(int read_fd, int write_fd, int child_pid, std::chrono::milliseconds timeout)
    : read_fd_(read_fd), write_fd_(write_fd), child_pid_(child_pid), timeout_(timeout) {}

StreamBackend::~StreamBackend() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  if (child_pid_ > 0) {
    int status = 0;
    // Closing stdin asks the child to exit; give it a moment before forcing it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(child_pid_, &status, WNOHANG) != 0) return;
      ::usleep(10000);
    }
    ::kill(child_pid_, SIGKILL);
    ::waitpid(child_pid_, &status, 0);
  }
}

std::unique_ptr<StreamBackend> StreamBackend::spawn(const std::string& command, std::chrono::milliseconds timeout) {
  ignore_sigpipe();
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) throw Error(ErrorCode::TransportClosed, std::string("pipe: ") + std::strerror(errno));
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw Error(ErrorCode::TransportClosed, std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::TransportClosed, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
  return std::unique_ptr<StreamBackend>(new StreamBackend(from_child[0], to_child[1], pid, timeout));
}

std::unique_ptr<StreamBackend> StreamBackend::connect(const std::string& host, std::uint16_t port,
                                                     std::chrono::milliseconds timeout) {
  ignore_sigpipe();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0) {
    throw Error(ErrorCode::TransportClosed, host + ":" + service + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  std::string last_error = "no address";
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_error = std::strerror(errno);
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) throw Error(ErrorCode::TransportClosed, host + ":" + service + ": " + last_error);
  return std::unique_ptr<StreamBackend>(new StreamBackend(fd, fd, -1, timeout));
}

bool StreamBackend::write_all(std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(write_fd_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

StreamBackend::ReadStatus StreamBackend::read_line(std::string& line,
                                                   std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      line.assign(buffer_, 0, nl);
      buffer_.erase(0, nl + 1);
      return ReadStatus::Line;
    }
    if (buffer_.size() > kMaxFrameBytes) {
      throw Error(ErrorCode::FrameTooLarge, "incoming line exceeds " + std::to_string(kMaxFrameBytes) + " bytes");
    }
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return ReadStatus::Timeout;
    const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{read_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait + 1, 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::Closed;
    }
    if (rc == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::Closed;
    }
    if (n == 0) return ReadStatus::Closed;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<BackendResponse> StreamBackend::dispatch(std::span<const RequestBody> batch) {
  std::lock_guard lock(mutex_);
  std::vector<BackendResponse> out(batch.size());
  std::unordered_map<std::uint64_t, std::size_t> pending;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out[i].id = next_id();
    pending.emplace(out[i].id, i);
  }
  auto fail_pending = [&](ErrorCode code, const std::string& message) {
    for (const auto& [id, index] : pending) {
      out[index].body = BackendFailure{code, "", message};
      if (code == ErrorCode::Timeout) abandoned_.push_back(id);
    }
    pending.clear();
  };

  if (closed_) {
    fail_pending(ErrorCode::TransportClosed, "backend connection is closed");
    return out;
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!write_all(frame_request(BackendRequest{out[i].id, batch[i]}))) {
      closed_ = true;
      fail_pending(ErrorCode::TransportClosed, "backend stopped accepting requests");
      return out;
    }
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  std::string line;
  while (!pending.empty()) {
    const ReadStatus status = read_line(line, deadline);
    if (status == ReadStatus::Timeout) {
      fail_pending(ErrorCode::Timeout, "no response within " + std::to_string(timeout_.count()) + " ms");
      break;
    }
    if (status == ReadStatus::Closed) {
      closed_ = true;
      fail_pending(ErrorCode::TransportClosed, "backend closed the stream");
      break;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    BackendResponse resp = parse_response(line);
    auto it = pending.find(resp.id);
    if (it == pending.end()) {
      // Late answers to requests that already timed out are dropped.
      if (auto ab = std::find(abandoned_.begin(), abandoned_.end(), resp.id); ab != abandoned_.end()) {
        abandoned_.erase(ab);
        continue;
      }
      throw Error(ErrorCode::MalformedMessage, "response for unknown request id " + std::to_string(resp.id));
    }
    out[it->second] = std::move(resp);
    pending.erase(it);
  }
  return out;
}

}  // namespace anticipate
