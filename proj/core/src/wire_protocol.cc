#include "ctximl/wire_protocol.h"

#include <cmath>
#include <string>

#include "ctximl/errors.h"
#include "json.hpp"

namespace ctximl::wire {
namespace {

// Ordered so encoded messages keep the documented field order.
using json = nlohmann::ordered_json;

json MatrixToJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json Parse(std::string_view line) {
  json msg = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (msg.is_discarded() || !msg.is_object())
    throw TransportError("malformed message: " + std::string(line.substr(0, 200)));
  if (!msg.contains("op") || !msg["op"].is_string())
    throw TransportError("message without op field");
  return msg;
}

Matrix JsonToMatrix(const json& rows, const char* field) {
  if (!rows.is_array()) throw TransportError(std::string(field) + " is not an array");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::Index p = -1;
  Matrix m;
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array()) throw TransportError(std::string(field) + " row is not an array");
    if (p < 0) {
      p = static_cast<Eigen::Index>(row.size());
      m.resize(n, p);
    }
    if (static_cast<Eigen::Index>(row.size()) != p)
      throw TransportError(std::string(field) + " is ragged");
    for (Eigen::Index j = 0; j < p; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw TransportError(std::string(field) + " has a non-numeric entry");
      m(i, j) = v.get<double>();
    }
  }
  if (p < 0) m.resize(0, 0);
  return m;
}

}  // namespace

std::string EncodeHello() {
  return json{{"op", "hello"}, {"version", kProtocolVersion}}.dump();
}

std::string EncodeHelloReply(int max_context) {
  return json{{"op", "hello"}, {"version", kProtocolVersion}, {"max_context", max_context}}.dump();
}

std::string EncodePredictRequest(std::int64_t id, const Dataset& train, const Matrix& inference) {
  json labels = json::array();
  for (Eigen::Index i = 0; i < train.labels().size(); ++i)
    labels.push_back(static_cast<int>(train.labels()[i]));
  json msg;
  msg["op"] = "predict";
  msg["id"] = id;
  msg["train_x"] = MatrixToJson(train.features());
  msg["train_y"] = std::move(labels);
  msg["inference_x"] = MatrixToJson(inference);
  return msg.dump();
}

std::string EncodeResult(std::int64_t id, const Vector& probabilities) {
  json proba = json::array();
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) proba.push_back(probabilities[i]);
  json msg;
  msg["op"] = "result";
  msg["id"] = id;
  msg["proba"] = std::move(proba);
  return msg.dump();
}

std::string EncodeError(std::int64_t id, std::string_view message) {
  json msg;
  msg["op"] = "error";
  msg["id"] = id;
  msg["message"] = std::string(message);
  return msg.dump();
}

HelloReply DecodeHelloReply(std::string_view line) {
  const json msg = Parse(line);
  if (msg["op"] != "hello") throw TransportError("handshake: expected hello reply");
  if (!msg.contains("version") || !msg["version"].is_number_integer())
    throw TransportError("handshake: missing version");
  HelloReply reply;
  reply.version = msg["version"].get<int>();
  if (reply.version != kProtocolVersion)
    throw TransportError("handshake: unsupported protocol version " +
                         std::to_string(reply.version));
  reply.max_context = msg.contains("max_context") && msg["max_context"].is_number_integer()
                          ? msg["max_context"].get<int>()
                          : kDefaultMaxContext;
  return reply;
}

Vector DecodeResult(std::string_view line, std::int64_t expected_id, Eigen::Index expected_rows) {
  const json msg = Parse(line);
  const std::string op = msg["op"].get<std::string>();
  if (op == "error") {
    const std::string text =
        msg.contains("message") && msg["message"].is_string() ? msg["message"].get<std::string>()
                                                              : "unspecified";
    throw TransportError("backend error: " + text);
  }
  if (op != "result") throw TransportError("unexpected op '" + op + "'");
  if (!msg.contains("id") || !msg["id"].is_number_integer() ||
      msg["id"].get<std::int64_t>() != expected_id)
    throw TransportError("response id does not match request " + std::to_string(expected_id));
  if (!msg.contains("proba") || !msg["proba"].is_array())
    throw TransportError("response without proba array");
  const json& proba = msg["proba"];
  if (static_cast<Eigen::Index>(proba.size()) != expected_rows) {
    throw TransportError("response has " + std::to_string(proba.size()) + " probabilities for " +
                         std::to_string(expected_rows) + " inference rows");
  }
  Vector out(expected_rows);
  for (Eigen::Index i = 0; i < expected_rows; ++i) {
    const json& v = proba[static_cast<std::size_t>(i)];
    if (!v.is_number()) throw TransportError("non-numeric probability");
    out[i] = v.get<double>();
    if (!(out[i] >= 0.0 && out[i] <= 1.0)) throw TransportError("probability outside [0, 1]");
  }
  return out;
}

std::string DecodeOp(std::string_view line) { return Parse(line)["op"].get<std::string>(); }

PredictRequest DecodePredictRequest(std::string_view line) try {
  const json msg = Parse(line);
  if (msg["op"] != "predict") throw TransportError("expected predict request");
  for (const char* field : {"id", "train_x", "train_y", "inference_x"})
    if (!msg.contains(field)) throw TransportError(std::string("request without ") + field);
  PredictRequest req;
  req.id = msg["id"].get<std::int64_t>();
  Matrix train_x = JsonToMatrix(msg["train_x"], "train_x");
  const json& ys = msg["train_y"];
  if (!ys.is_array() || static_cast<Eigen::Index>(ys.size()) != train_x.rows())
    throw TransportError("train_y length does not match train_x");
  Vector train_y(train_x.rows());
  for (Eigen::Index i = 0; i < train_y.size(); ++i)
    train_y[i] = ys[static_cast<std::size_t>(i)].get<double>();
  req.inference = JsonToMatrix(msg["inference_x"], "inference_x");
  try {
    req.train = Dataset(std::move(train_x), std::move(train_y));
  } catch (const ContractError& e) {
    throw TransportError(e.what());
  }
  return req;
} catch (const json::exception& e) {
  throw TransportError(std::string("malformed predict request: ") + e.what());
}

}  // namespace ctximl::wire
