#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "regx/errors.hpp"
#include "regx/losses.hpp"

using namespace regx;
using namespace regx::losses;

namespace {

RowVector vec(std::initializer_list<double> v) {
  RowVector r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

double naive_nce(const RowVector& mp, const RowVector& mn, const RowVector& h,
                 const RowVector& hp, const RowVector& hn) {
  const double num = std::exp(mp.dot(h));
  return -std::log(num / (std::exp(mp.dot(hp)) + std::exp(mn.dot(hn))));
}

}  // namespace

TEST_CASE("InfoNCE hand examples") {
  const double ln2 = std::numbers::ln2;
  const RowVector z = RowVector::Zero(2);
  CHECK(info_nce_loss(z, z, z, z, z) == doctest::Approx(ln2).epsilon(1e-12));
  const auto e0 = vec({1, 0}), e1 = vec({0, 1});
  CHECK(std::abs(info_nce_loss(e0, e1, e0, e0, e1) - ln2) < 1e-9);
  CHECK(std::abs(info_nce_loss(vec({2, 0}), e1, e0, e0, vec({0, 3})) -
                 std::log(1.0 + std::numbers::e)) < 1e-9);
}

TEST_CASE("InfoNCE: log-sum-exp equals the naive formula and is stable") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    RowVector v[5];
    for (auto& x : v) x = test::random_row(rng, 4, 2.0);
    CHECK(std::abs(info_nce_loss(v[0], v[1], v[2], v[3], v[4]) -
                   naive_nce(v[0], v[1], v[2], v[3], v[4])) < 1e-10);
  }
  const auto big = vec({400, 0});
  const double l = info_nce_loss(big, big, big, big, big);
  CHECK(std::isfinite(l));
  CHECK(l == doctest::Approx(std::numbers::ln2));
}

TEST_CASE("InfoNCE decreases strictly in the positive score") {
  // h and h_pos are orthogonal, so the first coordinate of h_mix_pos moves
  // h_mix_pos . h alone.
  const auto h = vec({1, 0}), hp = vec({0, 1}), hn = vec({0.1, -0.4}), mn = vec({0.5, 0.5});
  double prev = info_nce_loss(vec({-3.0, 0.7}), mn, h, hp, hn);
  for (double s = -2.5; s <= 3.0; s += 0.5) {
    const double cur = info_nce_loss(vec({s, 0.7}), mn, h, hp, hn);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("size loss examples") {
  const double ln2 = std::numbers::ln2;
  const RowVector z = RowVector::Zero(3);
  const std::vector<double> none(4, 0.0), ten(10, 1.0), hundred(100, 1.0);
  CHECK(std::abs(size_loss(none, z, 0.1) - ln2) < 1e-9);
  CHECK(std::abs(size_loss(ten, z, 0.1) - (1.0 + ln2)) < 1e-9);
  CHECK(std::abs(size_loss(hundred, z, 0.0003) - (0.03 + ln2)) < 1e-9);
  CHECK_THROWS_AS(size_loss(none, z, 0.0), ValidationError);
  CHECK_THROWS_AS(size_loss(none, z, -1.0), ValidationError);
}

TEST_CASE("size loss counts each undirected edge once, with slope gamma") {
  Rng rng(2);
  const Graph g = test::er_graph(rng, 0, 10, 0.4);
  const auto m = test::random_mask(rng, g);
  const auto hs = test::random_row(rng, 3);
  const auto w = g.edge_weights(m);
  CHECK(size_loss(m, hs, 0.01) == doctest::Approx(size_loss(w, hs, 0.01)).epsilon(1e-14));
  auto w2 = w;
  w2[0] += 0.25;
  CHECK(size_loss(w2, hs, 0.01) - size_loss(w, hs, 0.01) ==
        doctest::Approx(0.0025).epsilon(1e-9));
}

TEST_CASE("MSE and overall loss examples") {
  CHECK(mse_loss(3, 3) == 0.0);
  CHECK(mse_loss(0, 2) == 4.0);
  CHECK(mse_loss(1.5, -0.5) == 4.0);
  const LossWeights unit{1.0, 1.0, 0.003};
  CHECK(overall_loss(1, 2, 3, unit, SignMode::as_derived) == 6.0);
  CHECK(overall_loss(1, 2, 3, unit, SignMode::as_printed) == 2.0);
  const LossWeights off{0.0, 0.0, 0.003};
  CHECK(overall_loss(1.25, 2, 3, off, SignMode::as_derived) == 1.25);
  CHECK(overall_loss(1.25, 2, 3, off, SignMode::as_printed) == 1.25);
  CHECK(sign_mode_from_string(to_string(SignMode::as_printed)) == SignMode::as_printed);
  CHECK_THROWS_AS(sign_mode_from_string("sideways"), ValidationError);
}

TEST_CASE("numerically safe helpers") {
  CHECK(softplus(800.0) == doctest::Approx(800.0));
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(log_sigmoid(-800.0) == doctest::Approx(-800.0));
  CHECK(log_sigmoid(0.0) == doctest::Approx(-std::numbers::ln2));
}

TEST_CASE("analytic loss gradients match central differences") {
  Rng rng(5);
  constexpr double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    double worst = 0.0;
    RowVector v[5];
    for (auto& x : v) x = test::random_row(rng, 3, 1.5);
    const auto g = info_nce_grad(v[0], v[1], v[2], v[3], v[4]);
    const RowVector* grads[5] = {&g.h_mix_pos, &g.h_mix_neg, &g.h, &g.h_pos, &g.h_neg};
    for (int k = 0; k < 5; ++k) {
      for (int i = 0; i < 3; ++i) {
        const double fd = test::central_diff(
            [&] { return info_nce_loss(v[0], v[1], v[2], v[3], v[4]); }, v[k](i), h);
        worst = std::max(worst, test::rel_err((*grads[k])(i), fd, 1e-4));
      }
    }
    auto hs = test::random_row(rng, 3);
    std::vector<double> w{0.2, 0.7, 0.9};
    const auto sg = size_grad(hs, 0.05);
    for (double& x : w) {
      worst = std::max(worst, test::rel_err(sg.per_edge,
                                             test::central_diff([&] { return size_loss(w, hs, 0.05); }, x, h), 1e-4));
    }
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, test::rel_err(sg.h_star(i),
                                             test::central_diff([&] { return size_loss(w, hs, 0.05); }, hs(i), h), 1e-4));
    }
    double ya = uniform01(rng) * 4, yb = uniform01(rng) * 4;
    const auto [ga, gb] = mse_grad(ya, yb);
    worst = std::max(worst, test::rel_err(ga, test::central_diff([&] { return mse_loss(ya, yb); }, ya, h), 1e-4));
    worst = std::max(worst, test::rel_err(gb, test::central_diff([&] { return mse_loss(ya, yb); }, yb, h), 1e-4));
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("tape loss nodes agree with the value functions") {
  Rng rng(6);
  ad::Tape tape;
  RowVector v[5];
  std::vector<ad::Var> vars;
  for (auto& x : v) {
    x = test::random_row(rng, 4);
    vars.push_back(tape.variable(x));
  }
  const auto nce = info_nce(vars[0], vars[1], vars[2], vars[3], vars[4]);
  CHECK(nce.scalar() == doctest::Approx(info_nce_loss(v[0], v[1], v[2], v[3], v[4])).epsilon(1e-14));
  tape.backward(nce);
  const auto g = info_nce_grad(v[0], v[1], v[2], v[3], v[4]);
  CHECK((Matrix(vars[2].grad()) - Matrix(g.h)).cwiseAbs().maxCoeff() < 1e-14);

  ad::Tape t2;
  Matrix w(3, 1);
  w << 0.1, 0.5, 0.9;
  const auto hs = test::random_row(rng, 4);
  const auto s = size(t2.variable(w), t2.variable(hs), 0.02);
  const std::vector<double> wv{0.1, 0.5, 0.9};
  CHECK(s.scalar() == doctest::Approx(size_loss(wv, hs, 0.02)).epsilon(1e-14));
  ad::Tape t3;
  Matrix a(1, 1), b(1, 1);
  a << 1.5;
  b << -0.5;
  CHECK(mse(t3.variable(a), t3.variable(b)).scalar() == 4.0);
}

TEST_CASE("loss weight validation") {
  LossWeights w;
  w.gamma = 0.0;
  CHECK_THROWS_AS(w.validate(), ValidationError);
  w = LossWeights{};
  w.alpha = -1.0;
  CHECK_THROWS_AS(w.validate(), ValidationError);
}
