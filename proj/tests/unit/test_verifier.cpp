#include <doctest.h>

#include <cmath>

#include "tiara/consistency.hpp"
#include "tiara/errors.hpp"
#include "tiara/verifier.hpp"

using namespace tiara;
using namespace tiara::verifier;
using spectral::make_window;
using spectral::WindowKind;

TEST_SUITE("verifier") {
  TEST_CASE("closed-form alpha on hand-checked triples") {
    const double alpha = alpha_from_closed_form(0.5, 0.8, 0.3);
    CHECK(alpha == doctest::Approx(std::log(0.26 / 0.06)).epsilon(1e-14));
    CHECK(alpha == doctest::Approx(1.46634).epsilon(1e-5));
    CHECK(iota(alpha, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(lambda_coef(alpha, 0.3) == doctest::Approx(1.0).epsilon(1e-12));
    for (double eta : {0.1, 0.5, 0.9}) {
      const double a0 = alpha_from_closed_form(0.0, eta, 0.0);
      CHECK(a0 == doctest::Approx(std::log(1.0 / eta)).epsilon(1e-14));
      CHECK(iota(a0, 0.0) == doctest::Approx(eta).epsilon(1e-14));
    }
  }

  TEST_CASE("infeasible triples name the violated inequality") {
    auto message = [](double k, double e, double a) {
      try {
        alpha_from_closed_form(k, e, a);
      } catch (const InfeasibleError& err) {
        return std::string(err.what());
      }
      return std::string();
    };
    CHECK(message(0.8, 0.9, 0.3).find("kappa < 1 - a_min") != std::string::npos);
    CHECK(message(0.5, 0.6, 0.3).find("eta >= kappa / (1 - a_min)") != std::string::npos);
    CHECK(message(0.1, 1.0, 0.3).find("eta") != std::string::npos);
    CHECK(!message(0.1, 0.5, 1.0).empty());
    CHECK(!message(-0.1, 0.5, 0.2).empty());
    // Approaching the boundary from above: denominator under the floor.
    const double kappa = 0.35, a = 0.3;
    CHECK_THROWS_AS(alpha_from_closed_form(kappa, kappa / (1 - a) + 1e-14, a), InfeasibleError);
    CHECK(alpha_from_closed_form(kappa, kappa / (1 - a) + 1e-6, a) > 10.0);
  }

  TEST_CASE("feasibility boundary is exactly the two inequalities") {
    for (int i = 0; i < 30; ++i)
      for (int j = 1; j < 30; ++j)
        for (int l = 0; l < 30; ++l) {
          const double kappa = i / 30.0, eta = j / 30.0, a = l / 30.0;
          const bool ok = eta * (1 - a) - kappa > kAlphaDenominatorFloor && 1 - kappa - a * eta > 0;
          bool threw = false;
          try {
            const double alpha = alpha_from_closed_form(kappa, eta, a);
            CHECK(alpha >= 0.0);
          } catch (const InfeasibleError&) {
            threw = true;
          }
          CHECK(threw == !ok);
        }
  }

  TEST_CASE("proof coefficient identities") {
    for (double alpha : {0.0, 0.1, 1.0, 6.0, 40.0})
      for (double a : {0.0, 0.2, 0.7, 0.99}) {
        const double s = 1.0 - (1.0 - std::exp(-alpha)) * a;
        CHECK(std::fabs(iota(alpha, a) * s - std::exp(-alpha)) <= 1e-12);
        CHECK(std::fabs(lambda_coef(alpha, a) * s - (1.0 - std::exp(-alpha))) <= 1e-12);
      }
  }

  TEST_CASE("alpha grows with kappa while eta < 1") {
    // d/dkappa log(num/den) = 1/den - 1/num > 0 because den < num.
    for (double a : {0.0, 0.3, 0.6})
      for (double eta : {0.5, 0.9, 0.99}) {
        double prev = -1.0;
        for (double kappa = 0.0; kappa < eta * (1 - a); kappa += 0.01) {
          const double alpha = alpha_from_closed_form(kappa, eta, a);
          CHECK(alpha > prev);
          prev = alpha;
        }
      }
  }

  TEST_CASE("slack schedule") {
    CHECK(slack_for(32) == 0.15);
    CHECK(slack_for(127) == 0.15);
    CHECK(slack_for(128) == 0.05);
    CHECK(slack_for(256) == 0.05);
  }

  TEST_CASE("homogeneous attention generator") {
    CHECK_THROWS_AS(gen_homogeneous_attention(1, 1.0), DomainError);
    // Logits live in (0, 1], so a sharp decay saturates at diagonal logit 1 and
    // off-diagonal logits near 0 rather than a one-hot row.
    const auto sharp = attention::softmax_rows(gen_homogeneous_attention(4, 50.0));
    const double z = std::exp(1.0) + 3.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(sharp(i, j) == doctest::Approx(i == j ? std::exp(1.0) / z : 1.0 / z).epsilon(1e-12));
    const auto flat = attention::softmax_rows(gen_homogeneous_attention(6, 0.0));
    for (double v : flat.matrix().data()) CHECK(v == doctest::Approx(1.0 / 6).epsilon(1e-15));
    for (std::size_t n : {5, 32, 129})
      CHECK(consistency::homogeneity_deviation(
                attention::softmax_rows(gen_homogeneous_attention(n, 1.0)).matrix()) <= 1e-12);
  }

  TEST_CASE("value generator") {
    const auto pure = gen_inconsistent_values(16, 2.0, 2.0, 9);
    for (std::size_t n = 0; n < 16; ++n) CHECK(pure[n] == (n % 2 ? -2.0 : 2.0));
    CHECK(gen_inconsistent_values(64, 1.0, 0.5, 3) == gen_inconsistent_values(64, 1.0, 0.5, 3));
    CHECK(gen_inconsistent_values(64, 1.0, 0.5, 3) != gen_inconsistent_values(64, 1.0, 0.5, 4));
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      for (double v : gen_inconsistent_values(33, 1.5, 0.7, seed, 6)) CHECK(std::fabs(v) <= 1.5);
    CHECK_THROWS_AS(gen_inconsistent_values(16, 1.0, 0.0, 1), DomainError);
    CHECK_THROWS_AS(gen_inconsistent_values(16, 1.0, 1.5, 1), DomainError);
    CHECK_THROWS_AS(gen_inconsistent_values(16, 1.0, 0.5, 1, 9), DomainError);
  }

  TEST_CASE("synthetic signals keep E bounded away from zero") {
    const auto w = make_window(WindowKind::kBlackman, 9);
    const auto a = attention::softmax_rows(gen_homogeneous_attention(64, 1.0));
    const spectral::Signal x(multiply(a.matrix(), gen_inconsistent_values(64, 1.0, 0.5, 0)));
    CHECK(consistency::inconsistency_profile(x, w, 5).floor() > 0.0);
  }

  TEST_CASE("feasible instance: identity holds and reweighting reduces E") {
    const auto w = make_window(WindowKind::kBlackman, 9);
    for (std::size_t n : {64, 128, 256}) {
      // Tone at the threshold bin, no carrier.
      const auto inst = TheoremInstance::measure(gen_homogeneous_attention(n, 1.0),
                                                 gen_inconsistent_values(n, 1.0, 1.0, 0, 5), w, 5, 0.9);
      REQUIRE_MESSAGE(inst.feasible, inst.infeasibility());
      CHECK(inst.infeasibility().empty());
      const auto r = verify_theorem(inst);
      CHECK(r.identity_residual <= 1e-9);
      CHECK(r.alpha > 0.0);
      CHECK(r.per_tau.size() == n);
      CHECK(r.max_ratio < 1.0);
      CHECK(r.max_ratio <= r.eta + r.slack);
      CHECK(r.pass);
      for (const auto& row : r.per_tau) CHECK(row.ratio.has_value());
    }
  }

  TEST_CASE("eta close to one still gives a positive alpha and ratio below one") {
    const auto w = make_window(WindowKind::kBlackman, 9);
    const auto inst = TheoremInstance::measure(gen_homogeneous_attention(128, 1.0),
                                               gen_inconsistent_values(128, 1.0, 1.0, 2, 5), w, 5, 0.999);
    REQUIRE(inst.feasible);
    const auto r = verify_theorem(inst);
    CHECK(r.alpha > 0.0);
    CHECK(r.max_ratio < 1.0);
  }

  TEST_CASE("infeasible and degenerate instances are refused") {
    const auto w = make_window(WindowKind::kBlackman, 9);
    const auto nyquist = TheoremInstance::measure(gen_homogeneous_attention(32, 1.0),
                                                  gen_inconsistent_values(32, 1.0, 1.0, 0), w, 5, 0.9);
    CHECK_FALSE(nyquist.feasible);
    CHECK(nyquist.infeasibility().find("kappa < 1 - a_min") != std::string::npos);
    CHECK_THROWS_AS(verify_theorem(nyquist), InfeasibleError);

    const auto flat = TheoremInstance::measure(gen_homogeneous_attention(32, 1.0),
                                               std::vector<double>(32, 0.3),
                                               make_window(WindowKind::kRectangular, 32), 5, 0.9);
    CHECK(flat.kappa_hat == 0.0);
    CHECK(flat.feasible);
    CHECK_THROWS_AS(verify_theorem(flat), DomainError);
    CHECK_THROWS_AS(TheoremInstance::measure(gen_homogeneous_attention(8, 1.0),
                                             std::vector<double>(7, 0.0), w, 3, 0.9),
                    DomainError);
  }
}
