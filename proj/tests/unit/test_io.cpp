#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

#include "instances.hpp"
#include "qtur/error.hpp"
#include "qtur/io.hpp"

namespace qtur {
namespace {

using testing::Rng;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::kInvalidArgument;
}

TEST(Io, ModelRoundTrip) {
  Rng rng(1);
  const LindbladModel model = testing::random_model(3, 2, rng);
  const LindbladModel back = parse_model(model_to_json(model));
  EXPECT_EQ((back.hamiltonian() - model.hamiltonian()).norm(), 0.0);
  ASSERT_EQ(back.jump_pairs().size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ((back.jump_pairs()[k].forward - model.jump_pairs()[k].forward).norm(), 0.0);
    EXPECT_EQ((back.jump_pairs()[k].backward - model.jump_pairs()[k].backward).norm(), 0.0);
    EXPECT_EQ(back.jump_pairs()[k].entropy_current, model.jump_pairs()[k].entropy_current);
  }
}

TEST(Io, StateAndObservableRoundTrip) {
  Rng rng(2);
  const QuantumState rho = testing::random_full_rank_state(4, rng);
  EXPECT_EQ((parse_state(state_to_json(rho.matrix())).matrix() - rho.matrix()).norm(), 0.0);
  const Operator x = testing::random_hermitian(4, rng);
  EXPECT_EQ((parse_observable(observable_to_json(x)) - x).norm(), 0.0);
}

TEST(Io, ClassicalRoundTrip) {
  Rng rng(3);
  const auto chain = testing::random_reversible_chain(3, rng);
  const auto file = parse_classical_model(classical_model_to_json(chain.rates, chain.p, chain.f));
  EXPECT_EQ((file.rate_matrix.matrix() - chain.rates).norm(), 0.0);
  EXPECT_EQ((file.p0.vector() - chain.p).norm(), 0.0);
  EXPECT_EQ((file.f.vector() - chain.f).norm(), 0.0);
}

TEST(Io, RealEntriesAndDimCheck) {
  const auto x = parse_observable(R"({"observable": [[1, 0], [0, -1]]})");
  EXPECT_EQ(x(1, 1), Complex(-1.0, 0.0));
  const auto model = parse_model(
      R"({"dim": 2, "hamiltonian": [[1, 0], [0, 0]],
          "jump_pairs": [{"forward": [[0, 0], [1, 0]], "backward": [[0, 1], [0, 0]],
                          "entropy_current": 0}]})");
  EXPECT_EQ(model.dim(), 2);
  EXPECT_EQ(code_of([] { parse_model(R"({"dim": 3, "hamiltonian": [[1, 0], [0, 0]], "jump_pairs": []})"); }),
            ErrorCode::kDimMismatch);
}

TEST(Io, ParseErrors) {
  EXPECT_EQ(code_of([] { parse_state("{not json"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_state(R"({"density": [[1]]})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_state(R"({"rho": [[1, 0], [0]]})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_state(R"({"rho": [["a"]]})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_observable(R"({"observable": [[0, 1], [0, 0]]})"); }),
            ErrorCode::kNotHermitian);
  EXPECT_EQ(code_of([] { parse_state(R"({"rho": [[2, 0], [0, -1]]})"); }), ErrorCode::kInvalidState);
}

TEST(Io, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "qtur_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "obs.json";
  write_text_file(path, observable_to_json(testing::sigma_z()));
  EXPECT_EQ((load_observable(path) - testing::sigma_z()).norm(), 0.0);
  EXPECT_EQ(code_of([&] { load_model(dir / "missing.json"); }), ErrorCode::kIo);
  std::filesystem::remove_all(dir);
}

TEST(Io, FormatNumberRoundTrips) {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324,
                   std::numeric_limits<double>::max()}) {
    EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v) << format_number(v);
  }
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(16.0), "16");
}

TEST(Io, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xcbf29ce484222325ULL), "cbf29ce484222325");
  EXPECT_EQ(hex64(1), "0000000000000001");
}

}  // namespace
}  // namespace qtur
