#ifndef CTXIML_EXTERNAL_PREDICTOR_H_
#define CTXIML_EXTERNAL_PREDICTOR_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ctximl/predictor.h"

namespace ctximl {

// Bidirectional line transport.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void WriteLine(std::string_view line) = 0;
  // Returns the next line without its terminator; throws TransportError on
  // timeout or end of stream.
  virtual std::string ReadLine(std::chrono::milliseconds timeout) = 0;
};

// Child process whose stdin/stdout carry the lines.
class ChildProcessChannel final : public LineChannel {
 public:
  static std::unique_ptr<ChildProcessChannel> Spawn(const std::vector<std::string>& argv);
  ~ChildProcessChannel() override;

  ChildProcessChannel(const ChildProcessChannel&) = delete;
  ChildProcessChannel& operator=(const ChildProcessChannel&) = delete;

  void WriteLine(std::string_view line) override;
  std::string ReadLine(std::chrono::milliseconds timeout) override;

 private:
  ChildProcessChannel(int pid, int to_child, int from_child);

  int pid_;
  int to_child_;
  int from_child_;
  std::string buffer_;
};

// Predictor backed by a remote in-context model speaking the wire protocol.
// The handshake runs in the constructor. Calls are serialized per session.
struct ExternalPredictorOptions {
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
};

class ExternalPredictor final : public Predictor {
 public:
  using Options = ExternalPredictorOptions;

  explicit ExternalPredictor(std::unique_ptr<LineChannel> channel);
  ExternalPredictor(std::unique_ptr<LineChannel> channel, Options options);

  static std::unique_ptr<ExternalPredictor> Launch(const std::vector<std::string>& argv,
                                                   Options options = {});

  int max_context() const { return max_context_; }

 protected:
  Vector DoPredict(const Dataset& train, const Matrix& inference) const override;

 private:
  std::unique_ptr<LineChannel> channel_;
  Options options_;
  int max_context_ = 0;
  mutable std::mutex mutex_;
  mutable std::int64_t next_id_ = 1;
};

// Whitespace split honouring single and double quotes.
std::vector<std::string> SplitCommandLine(std::string_view command);

}  // namespace ctximl

#endif  // CTXIML_EXTERNAL_PREDICTOR_H_
