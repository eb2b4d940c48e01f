#ifndef CTXIML_WIRE_PROTOCOL_H_
#define CTXIML_WIRE_PROTOCOL_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "ctximl/dataset.h"

// Line-delimited JSON spoken between this library and an external predictor
// process over its stdin/stdout:
//
//   -> {"op":"hello","version":1}
//   <- {"op":"hello","version":1,"max_context":1024}
//   -> {"op":"predict","id":7,"train_x":[[...]],"train_y":[...],"inference_x":[[...]]}
//   <- {"op":"result","id":7,"proba":[...]}      or
//   <- {"op":"error","id":7,"message":"..."}
//
// Reals are written with enough digits to round-trip exactly.
namespace ctximl::wire {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kDefaultMaxContext = 1024;

struct HelloReply {
  int version = 0;
  int max_context = 0;
};

struct PredictRequest {
  std::int64_t id = 0;
  Dataset train;
  Matrix inference;
};

std::string EncodeHello();
std::string EncodeHelloReply(int max_context);
std::string EncodePredictRequest(std::int64_t id, const Dataset& train, const Matrix& inference);
std::string EncodeResult(std::int64_t id, const Vector& probabilities);
std::string EncodeError(std::int64_t id, std::string_view message);

// Client side. Throw TransportError on anything that does not match the
// schema, including an "error" reply, an id mismatch, a wrong number of
// probabilities or a probability outside [0, 1].
HelloReply DecodeHelloReply(std::string_view line);
Vector DecodeResult(std::string_view line, std::int64_t expected_id, Eigen::Index expected_rows);

// Server side, used by in-process test backends. Throws TransportError.
std::string DecodeOp(std::string_view line);
PredictRequest DecodePredictRequest(std::string_view line);

}  // namespace ctximl::wire

#endif  // CTXIML_WIRE_PROTOCOL_H_
