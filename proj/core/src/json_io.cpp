// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include "bl/json_io.hpp"

#include <cstdint>
#include <sstream>

namespace bl {

namespace {

std::vector<double> number_array(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(std::string(what) + ": expected a nonempty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number())
      throw SchemaError(std::string(what) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

Json to_json(const Dist& d) { return Json{{"p", d.probs()}}; }

Json to_json(const Measure& m) {
  return Json{{"w", m.weights()}, {"normalized", m.normalized()}};
}

Json to_json(const Channel& c) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < c.input_size(); ++x)
    rows.push_back(c.row(x).probs());
  return Json{{"rows", rows}};
}

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Dist dist_from_json(const Json& j) {
  try {
    return Dist(number_array(field(j, "p"), "Dist.p"));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

Measure measure_from_json(const Json& j) {
  bool normalized = false;
  if (j.contains("normalized")) {
    if (!j.at("normalized").is_boolean())
      throw SchemaError("Measure.normalized: expected a boolean");
    normalized = j.at("normalized").get<bool>();
  }
  try {
    return Measure(number_array(field(j, "w"), "Measure.w"), normalized);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

Channel channel_from_json(const Json& j) {
  const Json& rows = field(j, "rows");
  if (!rows.is_array() || rows.empty())
    throw SchemaError("Channel.rows: expected a nonempty array");
  std::vector<Dist> r;
  try {
    for (const auto& row : rows) r.emplace_back(number_array(row, "Channel row"));
    return Channel(std::move(r));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw SchemaError("matrix: expected a nonempty array of rows");
  std::size_t cols = 0;
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    rows.push_back(number_array(r, "matrix row"));
    if (cols == 0) cols = rows.back().size();
    if (rows.back().size() != cols) throw SchemaError("matrix: ragged rows");
  }
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return m;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  std::vector<double> v = number_array(j, "vector");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

ForwardProblem forward_problem_from_json(const Json& j) {
  Dist qx = dist_from_json(field(j, "qx"));
  std::vector<Channel> channels;
  for (const auto& c : field(j, "channels")) channels.push_back(channel_from_json(c));
  std::vector<Measure> refs;
  for (const auto& r : field(j, "refs")) refs.push_back(measure_from_json(r));
  std::vector<double> c = number_array(field(j, "c"), "c");
  try {
    return ForwardProblem(std::move(qx), std::move(channels), std::move(refs),
                          std::move(c));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

ReverseProblem reverse_problem_from_json(const Json& j) {
  Channel mac = channel_from_json(field(j, "mac"));
  std::vector<Dist> marg;
  for (const auto& q : field(j, "q_marginals")) marg.push_back(dist_from_json(q));
  Measure r_y = measure_from_json(field(j, "r_y"));
  std::vector<double> c = number_array(field(j, "c"), "c");
  try {
    return ReverseProblem(std::move(mac), std::move(marg), std::move(r_y),
                          std::move(c));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

GaussianProblem gaussian_problem_from_json(const Json& j) {
  GaussianProblem p;
  if (j.contains("channels")) {
    for (const auto& cj : j.at("channels")) {
      GaussianChannel ch;
      ch.A = matrix_from_json(field(cj, "A"));
      ch.sigma_noise = matrix_from_json(field(cj, "sigma"));
      if (cj.contains("b"))
        ch.b = vector_from_json(cj.at("b"));
      else
        ch.b = Eigen::VectorXd::Zero(ch.A.rows());
      p.channels.push_back(std::move(ch));
    }
  }
  if (j.contains("c")) p.c = number_array(j.at("c"), "c");
  if (j.contains("c0")) {
    if (!j.at("c0").is_number()) throw SchemaError("c0: expected a number");
    p.c0 = j.at("c0").get<double>();
  }
  p.M = matrix_from_json(field(j, "M"));
  if (j.contains("sigma_cap"))
    p.sigma_cap = matrix_from_json(j.at("sigma_cap"));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return p;
}

GaussianRef gaussian_ref_from_json(const Json& j) {
  GaussianRef r;
  r.cov = matrix_from_json(field(j, "cov"));
  if (j.contains("mean"))
    r.mean = vector_from_json(j.at("mean"));
  else
    r.mean = Eigen::VectorXd::Zero(r.cov.rows());
  return r;
}

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace bl
