#include "ctximl/external_predictor.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>
#include <thread>

#include "ctximl/errors.h"
#include "ctximl/wire_protocol.h"

namespace ctximl {

ChildProcessChannel::ChildProcessChannel(int pid, int to_child, int from_child)
    : pid_(pid), to_child_(to_child), from_child_(from_child) {}

std::unique_ptr<ChildProcessChannel> ChildProcessChannel::Spawn(
    const std::vector<std::string>& argv) {
  if (argv.empty()) throw TransportError("external predictor: empty command");
  // A dead child must surface as EPIPE, not kill this process.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0)
    throw TransportError("pipe: " + std::string(std::strerror(errno)));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw TransportError("pipe: " + std::string(std::strerror(errno)));
  }

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw TransportError("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  return std::unique_ptr<ChildProcessChannel>(
      new ChildProcessChannel(pid, in_pipe[1], out_pipe[0]));
}

ChildProcessChannel::~ChildProcessChannel() {
  ::close(to_child_);
  ::close(from_child_);
  int status = 0;
  for (int attempt = 0; attempt < 50; ++attempt) {
    if (::waitpid(pid_, &status, WNOHANG) != 0) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, &status, 0);
}

void ChildProcessChannel::WriteLine(std::string_view line) {
  std::string data(line);
  data.push_back('\n');
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("write to external predictor: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string ChildProcessChannel::ReadLine(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) throw TransportError("external predictor timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError("poll: " + std::string(std::strerror(errno)));
    }
    if (ready == 0) throw TransportError("external predictor timed out");
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("read from external predictor: " + std::string(std::strerror(errno)));
    }
    if (n == 0) throw TransportError("external predictor closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

ExternalPredictor::ExternalPredictor(std::unique_ptr<LineChannel> channel)
    : ExternalPredictor(std::move(channel), Options{}) {}

ExternalPredictor::ExternalPredictor(std::unique_ptr<LineChannel> channel, Options options)
    : channel_(std::move(channel)), options_(options) {
  if (!channel_) throw TransportError("external predictor: no channel");
  channel_->WriteLine(wire::EncodeHello());
  max_context_ = wire::DecodeHelloReply(channel_->ReadLine(options_.timeout)).max_context;
}

std::unique_ptr<ExternalPredictor> ExternalPredictor::Launch(const std::vector<std::string>& argv,
                                                             Options options) {
  return std::make_unique<ExternalPredictor>(ChildProcessChannel::Spawn(argv), options);
}

Vector ExternalPredictor::DoPredict(const Dataset& train, const Matrix& inference) const {
  std::lock_guard lock(mutex_);
  const std::int64_t id = next_id_++;
  channel_->WriteLine(wire::EncodePredictRequest(id, train, inference));
  return wire::DecodeResult(channel_->ReadLine(options_.timeout), id, inference.rows());
}

std::vector<std::string> SplitCommandLine(std::string_view command) {
  std::vector<std::string> out;
  std::string current;
  bool in_token = false;
  char quote = 0;
  for (char c : command) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        current.push_back(c);
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_token) out.push_back(std::move(current));
      current.clear();
      in_token = false;
    } else {
      current.push_back(c);
      in_token = true;
    }
  }
  if (quote) throw ContractError("unterminated quote in command line");
  if (in_token) out.push_back(std::move(current));
  return out;
}

}  // namespace ctximl
