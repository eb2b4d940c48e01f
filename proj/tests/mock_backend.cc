// Stand-in external predictor for protocol tests. Speaks the wire protocol
// on stdin/stdout.
//
//   mock_backend              kernel posterior (bandwidth 1)
//   mock_backend --constant   answers 0.5 for every row
//   mock_backend --short      drops the last probability
//   mock_backend --fail       answers every predict with an error
//   mock_backend --max-context N
#include <cstring>
#include <iostream>
#include <string>

#include "ctximl/errors.h"
#include "ctximl/reference_predictor.h"
#include "ctximl/wire_protocol.h"

int main(int argc, char** argv) {
  namespace wire = ctximl::wire;
  bool constant = false, drop_last = false, fail = false;
  int max_context = wire::kDefaultMaxContext;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--constant")) constant = true;
    if (!std::strcmp(argv[i], "--short")) drop_last = true;
    if (!std::strcmp(argv[i], "--fail")) fail = true;
    if (!std::strcmp(argv[i], "--max-context") && i + 1 < argc) max_context = std::stoi(argv[++i]);
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    std::string op;
    try {
      op = wire::DecodeOp(line);
    } catch (const ctximl::TransportError& e) {
      std::cout << wire::EncodeError(-1, e.what()) << std::endl;
      continue;
    }
    if (op == "hello") {
      std::cout << wire::EncodeHelloReply(max_context) << std::endl;
      continue;
    }
    if (op != "predict") {
      std::cout << wire::EncodeError(-1, "unknown op " + op) << std::endl;
      continue;
    }
    const wire::PredictRequest request = wire::DecodePredictRequest(line);
    if (fail) {
      std::cout << wire::EncodeError(request.id, "backend refused") << std::endl;
      continue;
    }
    if (request.train.rows() > max_context) {
      std::cout << wire::EncodeError(request.id, "context exceeds max_context") << std::endl;
      continue;
    }
    ctximl::Vector proba =
        constant ? ctximl::Vector::Constant(request.inference.rows(), 0.5)
                 : ctximl::ReferencePredict(request.train.features(), request.train.labels(),
                                            request.inference, 1.0);
    if (drop_last && proba.size() > 0) proba.conservativeResize(proba.size() - 1);
    std::cout << wire::EncodeResult(request.id, proba) << std::endl;
  }
  return 0;
}
