#include <cmath>
#include <vector>

#include <doctest.h>

#include "plumeloc/abc.hpp"
#include "plumeloc/dispersion.hpp"
#include "plumeloc/errors.hpp"
#include "plumeloc/rng.hpp"

using namespace plumeloc;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent straight-line transcriptions of the three mean-concentration
// formulas. Deliberately direct-space and naive: the library path must agree
// with these, not the other way round.
double oracle_m1(const GaussianLinearParams& p, const SensorLocation& s) {
  const double dx = s.x - p.x0;
  if (dx <= 0.0) return 0.0;
  const double sy = p.sigma0 + p.alpha * dx;
  const double sz = p.sigma0 + p.beta * dx;
  return p.b / (2.0 * kPi * sy * sz) * std::exp(-std::pow(s.y - p.y0, 2) / (2.0 * sy * sy)) *
         (std::exp(-std::pow(s.z - p.z0, 2) / (2.0 * sz * sz)) +
          std::exp(-std::pow(s.z + p.z0, 2) / (2.0 * sz * sz)));
}

double oracle_m2(const GaussianPowerParams& p, const SensorLocation& s) {
  const double dx = s.x - p.x0;
  if (dx <= 0.0) return 0.0;
  const double sy = p.sigma0 + p.alpha * p.rho * std::pow(dx / p.rho, p.gamma);
  const double sz = p.sigma0 + p.beta * dx;
  return p.b / (2.0 * kPi * sy * sz) * std::exp(-std::pow(s.y - p.y0, 2) / (2.0 * sy * sy)) *
         (std::exp(-std::pow(s.z - p.z0, 2) / (2.0 * sz * sz)) +
          std::exp(-std::pow(s.z + p.z0, 2) / (2.0 * sz * sz)));
}

double oracle_m3(const StretchExpParams& p, const SensorLocation& s) {
  const double dx = s.x - p.x0;
  if (dx <= 0.0) return 0.0;
  const double r = 1.0 + 2.0 * p.mu;
  const double tau = p.nu + (1.0 + p.mu) / (1.0 + 2.0 * p.mu);
  const double sy = p.sigma0 + p.alpha * p.rho * std::sqrt(dx / p.rho);
  const double sz = p.sigma0 + p.phi * p.rho * std::pow(r, 2.0 / r) * std::pow(dx / p.rho, 1.0 / r);
  return p.b / (2.0 * p.rho * p.rho) * std::pow(p.rho / dx, tau) *
         (std::exp(-(std::pow(s.z, r) - std::pow(p.z0, r)) / std::pow(sz, r)) +
          std::exp(-(std::pow(s.z, r) + std::pow(p.z0, r)) / std::pow(sz, r))) *
         std::exp(-std::pow(s.y - p.y0, 2) / (2.0 * sy * sy));
}

// 12 significant digits, with saturated/overflowed cases treated as equal.
void check_matches_oracle(double impl, double oracle) {
  if (!std::isfinite(oracle) || oracle >= kConcentrationCap) {
    CHECK(impl == kConcentrationCap);
    return;
  }
  if (oracle < 1e-280) {
    CHECK(impl <= 1e-280);
    return;
  }
  CHECK(impl == doctest::Approx(oracle).epsilon(1e-12));
}

GaussianLinearParams random_m1(RngStream& rng) {
  return {rng.uniform(-1000.0, 0.0), rng.uniform(-500.0, 500.0), rng.gamma(1.333, 3.0),
          rng.gamma(15.5, 0.03),     rng.gamma(2.0, 2.5),        rng.gamma(3.0, 0.5),
          rng.gamma(1.667, 0.15)};
}

GaussianPowerParams random_m2(RngStream& rng) {
  const auto base = random_m1(rng);
  return {base.x0,   base.y0,    base.z0,           base.sigma0,       base.b,
          base.alpha, base.beta, rng.gamma(6.0, 1.0), rng.beta(3.0, 3.0)};
}

StretchExpParams random_m3(RngStream& rng) {
  const auto base = random_m1(rng);
  return {base.x0,    base.y0,   base.z0,            base.sigma0,       base.b,
          base.alpha, base.beta, rng.gamma(6.0, 1.0), rng.beta(1.5, 3.0),
          rng.beta(6.0, 6.0)};
}

SensorLocation random_sensor(RngStream& rng) {
  return {rng.uniform(-1200.0, 1500.0), rng.uniform(-600.0, 600.0), rng.uniform(0.0, 50.0)};
}

}  // namespace

TEST_CASE("upwind sensors read zero for all models") {
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    auto p1 = random_m1(rng);
    auto p2 = random_m2(rng);
    auto p3 = random_m3(rng);
    SensorLocation s{p1.x0 - 10.0, rng.uniform(-500.0, 500.0), rng.uniform(0.0, 20.0)};
    CHECK(predict_gaussian_linear(p1, s) == 0.0);
    s.x = p2.x0;  // exactly at the source plane counts as upwind
    CHECK(predict_gaussian_power(p2, s) == 0.0);
    s.x = p3.x0 - 0.5;
    CHECK(predict_stretch_exp(p3, s) == 0.0);
  }
}

TEST_CASE("ground-level collapse case evaluates to 2") {
  // sigma0 = 0.5 and unit downwind distance make both spreads exactly 1, and
  // a ground source doubles the concentration through reflection.
  GaussianLinearParams p{0.0, 0.0, 0.0, 0.5, 2.0 * kPi, 0.5, 0.5};
  CHECK(predict_gaussian_linear(p, {1.0, 0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("frozen transcription values at a bench-scale geometry") {
  const SensorLocation s{0.0, 50.0, 9.3};
  GaussianLinearParams p1{-373.5, 0.0, 4.0, 0.465, 5.0, 1.5, 0.25};
  CHECK(predict_gaussian_linear(p1, s) ==
        doctest::Approx(2.9952966675092086e-05).epsilon(1e-12));

  GaussianPowerParams p2{-373.5, 0.0, 4.0, 0.465, 5.0, 1.5, 0.25, 6.0, 0.5};
  CHECK(predict_gaussian_power(p2, s) ==
        doctest::Approx(0.00018471164764098658).epsilon(1e-12));

  StretchExpParams p3{-373.5, 0.0, 4.0, 0.465, 5.0, 1.5, 0.25, 6.0, 0.25, 0.5};
  CHECK(p3.r() == doctest::Approx(1.5));
  CHECK(p3.tau() == doctest::Approx(0.5 + 1.25 / 1.5));
  CHECK(predict_stretch_exp(p3, s) ==
        doctest::Approx(0.00039569637432252915).epsilon(1e-12));
}

TEST_CASE("stretch-exponential collapse case evaluates to B") {
  // z0 = z = 0 makes the bracket 2, rho = dx = 1 kills the power law, and
  // the crosswind factor is 1 on the centreline.
  StretchExpParams p{0.0, 0.0, 0.0, 0.4, 3.5, 1.0, 0.3, 1.0, 0.25, 0.5};
  CHECK(predict_stretch_exp(p, {1.0, 0.0, 0.0}) == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("randomised agreement with straight-line transcriptions") {
  RngStream rng(202);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_m1(rng);
    const auto s = random_sensor(rng);
    check_matches_oracle(predict_gaussian_linear(p, s), oracle_m1(p, s));
  }
  for (int i = 0; i < 100; ++i) {
    const auto p = random_m2(rng);
    const auto s = random_sensor(rng);
    check_matches_oracle(predict_gaussian_power(p, s), oracle_m2(p, s));
  }
  for (int i = 0; i < 100; ++i) {
    const auto p = random_m3(rng);
    const auto s = random_sensor(rng);
    check_matches_oracle(predict_stretch_exp(p, s), oracle_m3(p, s));
  }
}

TEST_CASE("power-law model with gamma = 1 equals the linear model exactly") {
  RngStream rng(303);
  for (int i = 0; i < 500; ++i) {
    auto p2 = random_m2(rng);
    p2.gamma = 1.0;
    const GaussianLinearParams p1{p2.x0, p2.y0, p2.z0, p2.sigma0, p2.b, p2.alpha, p2.beta};
    const auto s = random_sensor(rng);
    // sigma_y reduces to sigma0 + alpha*(x-x0); rho*(dx/rho) is not evaluated
    // as dx bit-for-bit, so allow one rounding step.
    const double a = predict_gaussian_power(p2, s);
    const double b = predict_gaussian_linear(p1, s);
    CHECK(a == doctest::Approx(b).epsilon(5e-15));
  }
}

TEST_CASE("properties: non-negativity, symmetry, reflection, monotone decay") {
  RngStream rng(404);
  for (int i = 0; i < 10000; ++i) {
    const int which = static_cast<int>(rng.uniform01() * 3.0);
    const auto s = random_sensor(rng);
    // y0 = 128 and eighth-integer offsets keep the mirrored sensor positions
    // exactly representable, so the symmetry check can demand bit equality.
    const double y0 = 128.0;
    const double delta = std::floor(rng.uniform(0.0, 4096.0)) * 0.125;

    double c_plus = 0.0, c_minus = 0.0, c = 0.0;
    if (which == 0) {
      auto p = random_m1(rng);
      c = predict_gaussian_linear(p, s);
      p.y0 = y0;
      c_plus = predict_gaussian_linear(p, {s.x, y0 + delta, s.z});
      c_minus = predict_gaussian_linear(p, {s.x, y0 - delta, s.z});
    } else if (which == 1) {
      auto p = random_m2(rng);
      c = predict_gaussian_power(p, s);
      p.y0 = y0;
      c_plus = predict_gaussian_power(p, {s.x, y0 + delta, s.z});
      c_minus = predict_gaussian_power(p, {s.x, y0 - delta, s.z});
    } else {
      auto p = random_m3(rng);
      c = predict_stretch_exp(p, s);
      p.y0 = y0;
      c_plus = predict_stretch_exp(p, {s.x, y0 + delta, s.z});
      c_minus = predict_stretch_exp(p, {s.x, y0 - delta, s.z});
    }
    CHECK(c >= 0.0);
    CHECK(std::isfinite(c));
    CHECK(c_plus == c_minus);  // crosswind symmetry is exact
    CHECK(c_plus <= kConcentrationCap);
  }

  // Monotone decay in |y - y0| at fixed x, z.
  const GaussianPowerParams p{-373.5, 10.0, 4.0, 0.465, 5.0, 1.5, 0.25, 6.0, 0.5};
  double prev = std::numeric_limits<double>::infinity();
  for (double dy = 0.0; dy <= 500.0; dy += 2.5) {
    const double c = predict_gaussian_power(p, {100.0, p.y0 + dy, 9.3});
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("ground reflection doubles the concentration") {
  RngStream rng(505);
  for (int i = 0; i < 2000; ++i) {
    auto p1 = random_m1(rng);
    p1.z0 = 0.0;
    const auto s = random_sensor(rng);
    const double full = predict_gaussian_linear(p1, s);
    // Single-exponential transcription of the same formula, no reflection term.
    const double dx = s.x - p1.x0;
    if (dx <= 0.0) continue;
    const double sy = p1.sigma0 + p1.alpha * dx;
    const double sz = p1.sigma0 + p1.beta * dx;
    const double single = p1.b / (2.0 * kPi * sy * sz) *
                          std::exp(-std::pow(s.y - p1.y0, 2) / (2.0 * sy * sy)) *
                          std::exp(-std::pow(s.z, 2) / (2.0 * sz * sz));
    CHECK(full == doctest::Approx(2.0 * single).epsilon(1e-14));

    // For the stretched-exponential form the two bracket terms coincide at
    // z0 = 0, so the direct transcription is exactly twice the single term.
    auto p3 = random_m3(rng);
    p3.z0 = 0.0;
    const double full3 = predict_stretch_exp(p3, s);
    const double direct3 = oracle_m3(p3, s);
    if (std::isfinite(direct3) && direct3 > 1e-280 && direct3 < kConcentrationCap) {
      CHECK(full3 == doctest::Approx(direct3).epsilon(1e-12));
    }
  }
}

TEST_CASE("prefactor overflow saturates instead of producing inf or NaN") {
  StretchExpParams p{0.0, 0.0, 4.0, 0.465, 5.0, 1.5, 0.25, 6.0, 0.25, 0.5};
  const double c = predict_stretch_exp(p, {1e-300, 0.0, 0.0});
  CHECK(c == kConcentrationCap);
  CHECK(std::isfinite(c));
  // Squared-error sums with saturated entries stay finite.
  std::vector<double> obs(48, 0.0);
  std::vector<double> pred(48, kConcentrationCap);
  CHECK(std::isfinite(distance(obs, pred)));
}

TEST_CASE("predict_all dispatches and preserves sensor order") {
  SensorArray array;
  array.sensors = {{-400.0, 0.0, 9.3}, {-500.0, 10.0, 9.3}};
  const std::vector<double> theta2{-373.5, 0.0, 4.0, 0.465, 5.0, 1.5, 0.25, 6.0, 0.5};

  SUBCASE("both sensors upwind gives zeros") {
    const auto c = predict_all(ModelId::GaussianPower, theta2, array);
    CHECK(c == std::vector<double>{0.0, 0.0});
  }

  SUBCASE("single-sensor array matches the scalar operation") {
    SensorArray one;
    one.sensors = {{0.0, 50.0, 9.3}};
    const auto c = predict_all(ModelId::GaussianPower, theta2, one);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == predict_gaussian_power(GaussianPowerParams::from_vector(theta2),
                                         one.sensors[0]));
  }

  SUBCASE("48-sensor array matches 48 scalar evaluations elementwise") {
    SensorArray grid;
    RngStream rng(606);
    for (int i = 0; i < 48; ++i) grid.sensors.push_back(random_sensor(rng));
    const auto c = predict_all(ModelId::GaussianPower, theta2, grid);
    const auto p = GaussianPowerParams::from_vector(theta2);
    for (int i = 0; i < 48; ++i) {
      CHECK(c[i] == oracle_m2(p, grid.sensors[i]));
    }
  }

  SUBCASE("dimension mismatch is a configuration error") {
    CHECK_THROWS_AS(predict_all(ModelId::GaussianLinear, theta2, array), ValidationError);
  }
}

TEST_CASE("parameter registry") {
  CHECK(param_dim(ModelId::GaussianLinear) == 7);
  CHECK(param_dim(ModelId::GaussianPower) == 9);
  CHECK(param_dim(ModelId::StretchExp) == 10);
  CHECK(param_names(ModelId::StretchExp)[6] == "phi");
  CHECK(param_index(ModelId::GaussianPower, "gamma") == 8);
  CHECK_THROWS_AS(param_index(ModelId::GaussianLinear, "rho"), ValidationError);
  CHECK_THROWS_AS(model_from_int(4), ValidationError);

  // mu = 0 and mu = 1 are admissible; gamma = 0 or 1 are not.
  CHECK(param_domain(ModelId::StretchExp, 8).contains(0.0));
  CHECK(param_domain(ModelId::StretchExp, 8).contains(1.0));
  CHECK(!param_domain(ModelId::GaussianPower, 8).contains(0.0));
  CHECK(!param_domain(ModelId::GaussianPower, 8).contains(1.0));

  std::vector<double> bad{-373.5, 0.0, -1.0, 0.465, 5.0, 1.5, 0.25};
  CHECK_THROWS_AS(validate_params(ModelId::GaussianLinear, bad), ValidationError);
}
