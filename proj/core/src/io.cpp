#include "qtur/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qtur/error.hpp"

namespace qtur {

using json = nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

const json& require_key(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParse, std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::kParse, std::string(what) + " must be a number");
  return j.get<double>();
}

Complex complex_entry(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(ErrorCode::kParse, "matrix entries must be numbers or [re, im] pairs");
}

Operator matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw Error(ErrorCode::kParse, std::string(what) + " must be a non-empty array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Operator m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw Error(ErrorCode::kParse, std::string(what) + " has ragged rows");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = complex_entry(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Eigen::MatrixXd real_matrix_from_json(const json& j, const char* what) {
  const Operator m = matrix_from_json(j, what);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::kParse, std::string(what) + " must be real");
  }
  return m.real();
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::kParse, std::string(what) + " must be a non-empty array");
  }
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], what);
  return v;
}

json number_json(double v) {
  // JSON has no inf/nan.
  if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "cannot serialize non-finite value");
  return v;
}

json matrix_to_json(const Operator& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({number_json(m(r, c).real()), number_json(m(r, c).imag())}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

LindbladModel parse_model(std::string_view json_text) {
  const json j = parse_json(json_text);
  Operator h = matrix_from_json(require_key(j, "hamiltonian"), "hamiltonian");
  if (j.contains("dim")) {
    const json& dim = j.at("dim");
    if (!dim.is_number_integer() || dim.get<long long>() != h.rows()) {
      throw Error(ErrorCode::kDimMismatch, "'dim' does not match the hamiltonian");
    }
  }
  std::vector<JumpPair> pairs;
  const json& list = j.contains("jump_pairs") ? j.at("jump_pairs") : json::array();
  if (!list.is_array()) throw Error(ErrorCode::kParse, "'jump_pairs' must be an array");
  for (const json& p : list) {
    pairs.push_back({matrix_from_json(require_key(p, "forward"), "forward"),
                     matrix_from_json(require_key(p, "backward"), "backward"),
                     number(require_key(p, "entropy_current"), "entropy_current")});
  }
  return LindbladModel(std::move(h), std::move(pairs));
}

QuantumState parse_state(std::string_view json_text) {
  const json j = parse_json(json_text);
  return QuantumState(matrix_from_json(require_key(j, "rho"), "rho"));
}

Operator parse_observable(std::string_view json_text) {
  const json j = parse_json(json_text);
  Operator x = matrix_from_json(require_key(j, "observable"), "observable");
  if (x.rows() != x.cols()) throw Error(ErrorCode::kDimMismatch, "observable must be square");
  if (!is_hermitian(x)) throw Error(ErrorCode::kNotHermitian, "observable must be Hermitian");
  return hermitian_part(x);
}

std::string model_to_json(const LindbladModel& model) {
  json j;
  j["dim"] = model.dim();
  j["hamiltonian"] = matrix_to_json(model.hamiltonian());
  j["jump_pairs"] = json::array();
  for (const auto& p : model.jump_pairs()) {
    j["jump_pairs"].push_back({{"forward", matrix_to_json(p.forward)},
                               {"backward", matrix_to_json(p.backward)},
                               {"entropy_current", number_json(p.entropy_current)}});
  }
  return j.dump(2) + "\n";
}

std::string state_to_json(const Operator& rho) {
  return json{{"rho", matrix_to_json(rho)}}.dump(2) + "\n";
}

std::string observable_to_json(const Operator& x) {
  return json{{"observable", matrix_to_json(x)}}.dump(2) + "\n";
}

ClassicalModelFile parse_classical_model(std::string_view json_text) {
  const json j = parse_json(json_text);
  return {RateMatrix(real_matrix_from_json(require_key(j, "rate_matrix"), "rate_matrix")),
          ProbabilityVector(vector_from_json(require_key(j, "p0"), "p0")),
          ClassicalObservable(vector_from_json(require_key(j, "f"), "f"))};
}

std::string classical_model_to_json(const Eigen::MatrixXd& rate_matrix, const Eigen::VectorXd& p0,
                                    const Eigen::VectorXd& f) {
  json r = json::array();
  for (Index i = 0; i < rate_matrix.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < rate_matrix.cols(); ++k) row.push_back(number_json(rate_matrix(i, k)));
    r.push_back(std::move(row));
  }
  auto vec = [](const Eigen::VectorXd& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(number_json(v(i)));
    return a;
  };
  return json{{"rate_matrix", r}, {"p0", vec(p0)}, {"f", vec(f)}}.dump(2) + "\n";
}

LindbladModel load_model(const std::filesystem::path& path) {
  return parse_model(read_text_file(path));
}

QuantumState load_state(const std::filesystem::path& path) {
  return parse_state(read_text_file(path));
}

Operator load_observable(const std::filesystem::path& path) {
  return parse_observable(read_text_file(path));
}

ClassicalModelFile load_classical_model(const std::filesystem::path& path) {
  return parse_classical_model(read_text_file(path));
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace qtur
