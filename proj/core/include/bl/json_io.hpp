// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#ifndef BL_JSON_IO_HPP
#define BL_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "bl/finite_prob.hpp"
#include "bl/forward.hpp"
#include "bl/gaussian.hpp"
#include "bl/reverse.hpp"

namespace bl {

// Key order is preserved so identical inputs serialize byte-identically.
using Json = nlohmann::ordered_json;

/// Raised on any schema violation; the CLI maps it to exit code 2.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json to_json(const Dist& d);            // {"p":[...]}
Json to_json(const Measure& m);         // {"w":[...],"normalized":bool}
Json to_json(const Channel& c);         // {"rows":[[...],...]}
Json to_json(const Eigen::MatrixXd& m); // row-major nested arrays
Json to_json(const Eigen::VectorXd& v);

Dist dist_from_json(const Json& j);
Measure measure_from_json(const Json& j);
Channel channel_from_json(const Json& j);
Eigen::MatrixXd matrix_from_json(const Json& j);
Eigen::VectorXd vector_from_json(const Json& j);

ForwardProblem forward_problem_from_json(const Json& j);
ReverseProblem reverse_problem_from_json(const Json& j);
GaussianProblem gaussian_problem_from_json(const Json& j);
GaussianRef gaussian_ref_from_json(const Json& j);

// FNV-1a over the raw input bytes, hex-encoded.
std::string digest_hex(const std::string& bytes);

}  // namespace bl

#endif  // BL_JSON_IO_HPP
