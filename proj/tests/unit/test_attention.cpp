#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "tiara/attention.hpp"
#include "tiara/errors.hpp"

using namespace tiara;
using namespace tiara::attention;
using spectral::make_window;
using spectral::Signal;
using spectral::WindowKind;

namespace {

AttentionLogits random_logits(std::mt19937_64& g, std::size_t n, double spread = 3.0) {
  return AttentionLogits(fixture::to_matrix(oracle::uniform(g, n, n, -spread, spread)));
}

VideoLatentSlice random_values(std::mt19937_64& g, std::size_t n, std::size_t d) {
  return VideoLatentSlice(fixture::to_matrix(oracle::uniform(g, n, d, -1, 1)));
}

ReweightMatrix diagonal(std::size_t n, double alpha) {
  MotionProfile m{std::vector<double>(n, 0.0), {}, make_window(WindowKind::kBlackman, 9)};
  return build_reweight_matrix(m, alpha, 0, 0.0);
}

}  // namespace

TEST_SUITE("attention") {
  TEST_CASE("type invariants") {
    CHECK_THROWS_AS(AttentionLogits(Matrix(2, 3)), DomainError);
    CHECK_THROWS_AS(AttentionLogits(Matrix(0, 0)), DomainError);
    CHECK_THROWS_AS(AttentionLogits(Matrix(1, 1, NAN)), DomainError);
    CHECK_THROWS_AS(AttentionMap(Matrix(2, 2, 0.7)), DomainError);
    CHECK_THROWS_AS(AttentionMap(Matrix(2, 2, std::vector<double>{1.5, -0.5, 0.5, 0.5})), DomainError);
    CHECK_NOTHROW(AttentionMap(Matrix(2, 2, 0.5)));
    CHECK_THROWS_AS(VideoLatentSlice(Matrix(2, 1, INFINITY)), DomainError);
    CHECK(VideoLatentSlice(Matrix(2, 2, std::vector<double>{1, -3, 2, 0})).max_abs() == 3.0);
  }

  TEST_CASE("softmax of a 2:1 ratio") {
    const double l2 = std::numbers::ln2;
    const auto a = softmax_rows(AttentionLogits(Matrix(2, 2, std::vector<double>{l2, 0, 0, l2})));
    CHECK(a(0, 0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(a(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(a(1, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(a(1, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  }

  TEST_CASE("softmax matches the naive oracle and survives large logits") {
    std::mt19937_64 g(31);
    const auto raw = oracle::uniform(g, 8, 8, -4, 4);
    const auto a = softmax_rows(AttentionLogits(fixture::to_matrix(raw)));
    CHECK(fixture::max_abs_diff(a.matrix(), oracle::softmax(raw)) <= 1e-12);
    for (std::size_t i = 0; i < 8; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 8; ++j) s += a(i, j);
      CHECK(std::fabs(s - 1.0) <= 1e-12);
    }
    Matrix big(3, 3, 1000.0);
    big(0, 0) = 1001.0;
    const auto b = softmax_rows(AttentionLogits(big));
    CHECK(b.matrix().all_finite());
    CHECK(b(1, 1) == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("zero reweighting leaves attention unchanged") {
    std::mt19937_64 g(32);
    const auto logits = random_logits(g, 6);
    const auto values = random_values(g, 6, 3);
    const auto plain = softmax_rows(logits);
    const auto r = reweighted_attention(logits, diagonal(6, 0.0), values);
    CHECK(r.attention.matrix() == plain.matrix());
    const auto expect = multiply(plain.matrix(), values.values());
    CHECK(r.output.values() == expect);
  }

  TEST_CASE("two-frame diagonal penalty of ln 2") {
    Matrix zero(2, 2, 0.0);
    const auto r = reweighted_attention(AttentionLogits(zero), diagonal(2, std::numbers::ln2),
                                        VideoLatentSlice(Matrix(2, 1, std::vector<double>{1, 0})));
    CHECK(r.attention(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(r.attention(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(r.output.values()(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  }

  TEST_CASE("dimension mismatch names both shapes") {
    std::mt19937_64 g(33);
    try {
      reweighted_attention(random_logits(g, 4), diagonal(4, 1.0), random_values(g, 5, 2));
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      const std::string what = e.what();
      CHECK(what.find("4x4") != std::string::npos);
      CHECK(what.find("5x2") != std::string::npos);
    }
    CHECK_THROWS_AS(reweighted_attention(random_logits(g, 4), diagonal(3, 1.0), random_values(g, 4, 2)),
                    DomainError);
  }

  TEST_CASE("closed-form diagonal reweighting equals direct softmax") {
    std::mt19937_64 g(34);
    for (int seed = 0; seed < 100; ++seed) {
      const std::size_t n = 2 + seed % 30;
      const auto logits = random_logits(g, n);
      const auto x = softmax_rows(logits);
      for (double alpha : {0.5, 2.0, 6.0}) {
        const auto direct = softmax_rows(AttentionLogits(logits.scores() + diagonal(n, alpha).lambda));
        const auto closed = closed_form_diagonal_reweight(x, alpha);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) CHECK(std::fabs(closed(i, j) - direct(i, j)) <= 1e-12);
      }
    }
  }

  TEST_CASE("diagonal suppression and row sums under reweighting") {
    std::mt19937_64 g(35);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 3 + trial % 12;
      const auto logits = random_logits(g, n);
      const auto x = softmax_rows(logits);
      const auto y = reweighted_attention(logits, diagonal(n, 1.5), random_values(g, n, 1)).attention;
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) {
          s += y(i, j);
          if (j == i) CHECK(y(i, i) < x(i, i));
          else CHECK(y(i, j) > x(i, j));
        }
        CHECK(std::fabs(s - 1.0) <= 1e-9);
      }
    }
  }

  TEST_CASE("reweight matrix construction") {
    const auto w = make_window(WindowKind::kBlackman, 9);
    const MotionProfile moving{std::vector<double>(4, 1.0), {}, w};
    const MotionProfile still{std::vector<double>(4, 0.0), {}, w};
    CHECK(build_reweight_matrix(moving, 6.0, 0, 3.0).lambda == Matrix(4, 4, 0.0));
    CHECK(build_reweight_matrix(still, 6.0, 0, 3.0).lambda ==
          Matrix(4, 4, std::vector<double>{-6, 0, 0, 0, 0, -6, 0, 0, 0, 0, -6, 0, 0, 0, 0, -6}));
    const auto corners = build_reweight_matrix(moving, 6.0, 1, 2.0).lambda;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const bool corner = (i == 0 && j == 3) || (i == 3 && j == 0);
        CHECK(corners(i, j) == (corner ? -2.0 : 0.0));
      }
    CHECK_THROWS_AS(build_reweight_matrix(moving, 6.0, 3, 2.0), DomainError);
    CHECK_THROWS_AS(build_reweight_matrix(moving, -1.0, 0, 2.0), DomainError);
    CHECK_THROWS_AS(build_reweight_matrix(moving, 1.0, 0, -2.0), DomainError);
    CHECK_THROWS_AS(build_reweight_matrix(MotionProfile{{0.5, 1.5}, {}, w}, 1.0, 0, 0.0), DomainError);
  }

  TEST_CASE("corner triangles are symmetric with the expected size") {
    std::mt19937_64 g(36);
    const auto w = make_window(WindowKind::kBlackman, 9);
    for (std::size_t n : {5, 8, 13}) {
      const MotionProfile m{oracle::uniform(g, n, 0, 1), {}, w};
      for (std::size_t c = 0; c <= n / 2; ++c) {
        const auto lam = build_reweight_matrix(m, 4.0, c, 1.5).lambda;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            CHECK(lam(i, j) == lam(j, i));
            CHECK(lam(i, j) <= 0.0);
            if (i != j && lam(i, j) != 0.0) ++count;
          }
        CHECK(count == c * (c + 1));
      }
    }
  }

  TEST_CASE("diagonal is monotone in alpha and rho") {
    const auto w = make_window(WindowKind::kBlackman, 9);
    const MotionProfile m{{0.0, 0.25, 0.5, 0.75, 1.0}, {}, w};
    double prev_alpha_entry = 1.0;
    for (double alpha : {0.0, 1.0, 3.0, 6.0}) {
      const auto lam = build_reweight_matrix(m, alpha, 0, 0.0).lambda;
      for (std::size_t i = 1; i < 5; ++i) CHECK(lam(i, i) >= lam(i - 1, i - 1));
      CHECK(lam(0, 0) <= prev_alpha_entry);
      prev_alpha_entry = lam(0, 0);
    }
  }

  TEST_CASE("frequency band defaults and validation") {
    const auto b = FrequencyBand::defaults(24);
    CHECK(b.phi1 == 3);
    CHECK(b.phi2 == 13);
    CHECK(FrequencyBand::defaults(25).phi1 == 4);
    CHECK(FrequencyBand::defaults(1) == FrequencyBand{0, 1});
    CHECK_NOTHROW(b.validate(24));
    CHECK_THROWS_AS((FrequencyBand{5, 5}.validate(24)), DomainError);
    CHECK_THROWS_AS((FrequencyBand{1, 14}.validate(24)), DomainError);
    CHECK(padded_length(16, make_window(WindowKind::kBlackman, 9)) == 24);
    CHECK(padded_length(16, make_window(WindowKind::kBlackman, 8)) == 24);
  }

  TEST_CASE("constant rows carry no motion") {
    for (std::size_t len : {1, 7, 8, 9}) {
      const auto w = make_window(WindowKind::kBlackman, len);
      for (std::size_t n : {1, 4, 16}) {
        const Signal row(std::vector<double>(n, 1.0 / n));
        for (std::size_t i = 0; i < n; ++i) CHECK(motion_intensity(row, w, i) == 0.0);
      }
    }
  }

  TEST_CASE("alternating rows are almost all high band") {
    auto alternating = [](std::size_t n) {
      std::vector<double> v(n);
      for (std::size_t t = 0; t < n; ++t) v[t] = t % 2 ? 0.05 : 0.2;
      return Signal(v);
    };
    for (auto kind : {WindowKind::kBlackman, WindowKind::kHann})
      for (std::size_t len : {7, 8, 9})
        for (std::size_t n : {8, 16, 32})
          for (std::size_t i = 0; i < n; ++i) CHECK(motion_intensity(alternating(n), make_window(kind, len), i) >= 0.99);
    // Rectangular windows leak sinc sidelobes; with phi1 <= N/2 < phi2 the
    // whole leakage stays in band.
    for (std::size_t len : {4, 8, 16})
      for (std::size_t n : {8, 16, 32}) {
        const auto w = make_window(WindowKind::kRectangular, len);
        const FrequencyBand band{1, padded_length(n, w) / 2 + 1};
        for (std::size_t i = 0; i < n; ++i) CHECK(motion_intensity(alternating(n), w, i, band) >= 0.99);
      }
  }

  TEST_CASE("motion intensity matches the oracle and stays in range") {
    std::mt19937_64 g(37);
    for (std::size_t len : {7, 8, 9}) {
      const auto w = make_window(WindowKind::kBlackman, len);
      for (std::size_t n : {5, 16, 33}) {
        const auto v = oracle::uniform(g, n, 0, 1);
        const std::size_t p = padded_length(n, w);
        for (std::size_t i = 0; i < n; ++i) {
          const double r = motion_intensity(Signal(v), w, i);
          CHECK(r >= 0.0);
          CHECK(r <= 1.0);
          CHECK(std::fabs(r - oracle::rho(v, w.coefficients, i)) <= 1e-10);
          const FrequencyBand band{1, p / 2};
          CHECK(std::fabs(motion_intensity(Signal(v), w, i, band) -
                          oracle::rho(v, w.coefficients, i, 1, static_cast<long>(p / 2))) <= 1e-10);
        }
      }
    }
  }

  TEST_CASE("motion intensity is invariant to positive scaling") {
    std::mt19937_64 g(38);
    const auto w = make_window(WindowKind::kBlackman, 9);
    for (int trial = 0; trial < 20; ++trial) {
      auto v = oracle::uniform(g, 16, 0, 1);
      for (double c : {1e-3, 0.5, 7.0, 1e4}) {
        std::vector<double> s(v);
        for (double& x : s) x *= c;
        for (std::size_t i = 0; i < 16; ++i)
          CHECK(std::fabs(motion_intensity(Signal(s), w, i) - motion_intensity(Signal(v), w, i)) <= 1e-12);
      }
    }
  }

  TEST_CASE("motion intensity rejects bad bands and rows") {
    const auto w = make_window(WindowKind::kBlackman, 9);
    const Signal row({0.1, 0.2, 0.3, 0.4});
    CHECK_THROWS_AS(motion_intensity(row, w, 0, FrequencyBand{3, 2}), DomainError);
    CHECK_THROWS_AS(motion_intensity(row, w, 0, FrequencyBand{1, 8}), DomainError);
    CHECK_THROWS_AS(motion_intensity(row, w, 4), DomainError);
  }

  TEST_CASE("tiara with zero alpha and no corners is plain attention") {
    std::mt19937_64 g(39);
    std::vector<AttentionLogits> logits;
    std::vector<VideoLatentSlice> values;
    for (int c = 0; c < 4; ++c) {
      logits.push_back(random_logits(g, 10));
      values.push_back(random_values(g, 10, 3));
    }
    TiaraOptions o;
    o.alpha = 0.0;
    const auto cells = attention::tiara(logits, values, o);
    REQUIRE(cells.size() == 4);
    for (std::size_t c = 0; c < 4; ++c) {
      const auto plain = softmax_rows(logits[c]);
      CHECK(cells[c].attention.matrix() == plain.matrix());
      CHECK(cells[c].output.values() == multiply(plain.matrix(), values[c].values()));
    }
  }

  TEST_CASE("tiara on constant rows equals the full static penalty") {
    std::mt19937_64 g(40);
    const AttentionLogits logits(Matrix(8, 8, 0.3));
    const auto values = random_values(g, 8, 2);
    TiaraOptions o;
    const auto cell = attention::tiara(std::span(&logits, 1), std::span(&values, 1), o).front();
    for (double r : cell.motion.rho) CHECK(r == 0.0);
    MotionProfile still{std::vector<double>(8, 0.0), {}, o.window};
    const auto lam = build_reweight_matrix(still, 6.0, 2, 3.0);
    const auto direct = reweighted_attention(logits, lam, values);
    CHECK(cell.attention.matrix() == direct.attention.matrix());
    CHECK(cell.output.values() == direct.output.values());
  }

  TEST_CASE("tiara matches a straight-line reference and is thread-count independent") {
    std::mt19937_64 g(41);
    std::vector<AttentionLogits> logits;
    std::vector<VideoLatentSlice> values;
    std::vector<oracle::Mat> raw_l, raw_v;
    for (int c = 0; c < 6; ++c) {
      raw_l.push_back(oracle::uniform(g, 12, 12, -2, 2));
      raw_v.push_back(oracle::uniform(g, 12, 2, -1, 1));
      logits.emplace_back(fixture::to_matrix(raw_l.back()));
      values.emplace_back(fixture::to_matrix(raw_v.back()));
    }
    TiaraOptions o;
    o.window = make_window(WindowKind::kBlackman, 7);
    o.alpha = 5.0;
    o.threads = 1;
    const auto serial = attention::tiara(logits, values, o);
    o.threads = 4;
    const auto parallel = attention::tiara(logits, values, o);
    for (std::size_t c = 0; c < 6; ++c) {
      CHECK(serial[c].output.values() == parallel[c].output.values());
      const auto ref = oracle::reweight_location(raw_l[c], raw_v[c], o.window.coefficients, 5.0, 3, 2.5);
      CHECK(fixture::max_abs_diff(serial[c].attention.matrix(), ref.attention) <= 1e-10);
      CHECK(fixture::max_abs_diff(serial[c].output.values(), ref.output) <= 1e-10);
    }
  }

  TEST_CASE("tiara rejects mismatched fields") {
    std::mt19937_64 g(42);
    std::vector<AttentionLogits> logits{random_logits(g, 6), random_logits(g, 7)};
    std::vector<VideoLatentSlice> values{random_values(g, 6, 1), random_values(g, 7, 1)};
    CHECK_THROWS_AS(attention::tiara(logits, values, TiaraOptions{}), DomainError);
    CHECK_THROWS_AS(attention::tiara(std::span(logits).first(1), values, TiaraOptions{}), DomainError);
  }
}
