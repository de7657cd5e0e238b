#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "qtur/classical_bridge.hpp"
#include "qtur/lindblad_model.hpp"
#include "qtur/operator_algebra.hpp"

// File formats. Complex matrix entries are [re, im] pairs; plain numbers are
// accepted as real entries.
//
//   model:       {"dim": d, "hamiltonian": M, "jump_pairs": [{"forward": M,
//                 "backward": M, "entropy_current": s}, ...]}
//   state:       {"rho": M}
//   observable:  {"observable": M}
//   classical:   {"rate_matrix": [[...]], "p0": [...], "f": [...]}
//
// Parse failures raise kParse, unreadable files kIo. Semantic checks (shape,
// hermiticity, positivity) raise the domain errors of the constructed types.

namespace qtur {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

LindbladModel parse_model(std::string_view json_text);
QuantumState parse_state(std::string_view json_text);
Operator parse_observable(std::string_view json_text);

std::string model_to_json(const LindbladModel& model);
std::string state_to_json(const Operator& rho);
std::string observable_to_json(const Operator& x);

struct ClassicalModelFile {
  RateMatrix rate_matrix;
  ProbabilityVector p0;
  ClassicalObservable f;
};

ClassicalModelFile parse_classical_model(std::string_view json_text);
std::string classical_model_to_json(const Eigen::MatrixXd& rate_matrix, const Eigen::VectorXd& p0,
                                    const Eigen::VectorXd& f);

LindbladModel load_model(const std::filesystem::path& path);
QuantumState load_state(const std::filesystem::path& path);
Operator load_observable(const std::filesystem::path& path);
ClassicalModelFile load_classical_model(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace qtur
