#include <gtest/gtest.h>

#include "gaf/config.hpp"
#include "gaf/errors.hpp"

using namespace gaf;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.conf");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ParsesAllSections) {
  const auto c = parse_config(R"(# comment
model.kind = radial_polynomial
model.coefficients = 1.0, 0.1
model.truncation_radius = 1.75
model.curvature_floor = 2
model.n_ladder = 50,100 , 200
basis.method = numeric
basis.tail_tol = 1e-12

form.kind = bump
form.radius = 0.5
clt.samples = 300
clt.seed = 18446744073709551615
quad.radial_nodes = 12
quad.angular_nodes = 64
roots.polish_tol = 1e-11
asym.b0 = 3.5
asym.k = 2
conditions.floor = 0.1
debug.corrupt_basis = false
)");
  const auto& e = c.experiment;
  EXPECT_EQ(e.model.kind, WeightKind::RadialPolynomial);
  EXPECT_EQ(e.model.coefficients, (std::vector<double>{1.0, 0.1}));
  EXPECT_EQ(e.n_ladder, (std::vector<int>{50, 100, 200}));
  EXPECT_EQ(e.basis_method, BasisMethod::Numeric);
  EXPECT_EQ(e.samples, 300);
  EXPECT_EQ(e.seed, 18446744073709551615ull);
  EXPECT_EQ(e.quad.radial_nodes, 12);
  EXPECT_EQ(e.quad.angular_nodes, 64);
  EXPECT_DOUBLE_EQ(e.roots.polish_tol, 1e-11);
  EXPECT_DOUBLE_EQ(e.b0, 3.5);
  EXPECT_EQ(e.k, 2);
  EXPECT_DOUBLE_EQ(c.thresholds.condition_i_floor, 0.1);
  EXPECT_EQ(c.entries.size(), 18u);
}

TEST(Config, Diagnostics) {
  EXPECT_NE(error_of("model.kind = bargmann_fock\nmodel.colour = red\n").find("t.conf:2: unknown field 'model.colour'"),
            std::string::npos);
  EXPECT_NE(error_of("clt.samples = many\n").find("t.conf:1: field 'clt.samples'"),
            std::string::npos);
  EXPECT_NE(error_of("asym.b0 = 3\nasym.b0 = 4\n").find("already set on line 1"),
            std::string::npos);
  EXPECT_NE(error_of("just some words\n").find("t.conf:1: expected 'key = value'"),
            std::string::npos);
  EXPECT_NE(error_of("clt.samples = 50\n").find("at least 100"), std::string::npos);
  EXPECT_NE(error_of("form.radius = 2\n").find("form.radius"), std::string::npos);
  EXPECT_NE(error_of("model.kind = torus\n").find("expected bargmann_fock"), std::string::npos);
  EXPECT_NE(error_of("model.n_ladder = 50, -3\n").find("positive integer"), std::string::npos);
  EXPECT_NE(error_of("model.kind = radial_polynomial\nmodel.coefficients = 1, 0.1\n")
                .find("closed_form requires bargmann_fock"),
            std::string::npos);
  EXPECT_NE(error_of("asym.b0 =\n").find("no value"), std::string::npos);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/dir/x.conf"), ConfigError);
}
