#include "emax/autodiff.hpp"
#include "emax/rng.hpp"

#include <doctest.h>

#include <functional>

using namespace emax;
using namespace emax::ad;

namespace {

Tensor random_tensor(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  Tensor t(rows, cols);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = normal(rng, 0.0, scale);
  return t;
}

// Relative error with an absolute floor for near-zero analytic entries.
void check_close(const Tensor& analytic, const Tensor& numeric) {
  REQUIRE(analytic.rows() == numeric.rows());
  REQUIRE(analytic.cols() == numeric.cols());
  for (Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double n = numeric.data()[i];
    if (std::abs(a) < 1e-8) {
      CHECK(std::abs(n) <= 1e-6);
    } else {
      CHECK(std::abs(a - n) / std::max(std::abs(a), std::abs(n)) <= 1e-4);
    }
  }
}

using Builder = std::function<NodeId(Graph&, std::vector<NodeId>&)>;

// Builds a scalar loss from parameter leaves and compares every parameter
// gradient against central differences.
void gradient_check(std::vector<Parameter> params, const Builder& build) {
  Graph g;
  std::vector<NodeId> leaves;
  for (Parameter& p : params) leaves.push_back(g.parameter(p));
  const NodeId loss = build(g, leaves);
  for (Parameter& p : params) p.zero_grad();
  g.backward(loss);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto f = [&](const Tensor& x) {
      std::vector<Parameter> probe = params;
      probe[k].value = x;
      Graph h;
      std::vector<NodeId> l;
      for (Parameter& p : probe) l.push_back(h.parameter(p));
      return h.value(build(h, l))(0, 0);
    };
    check_close(params[k].grad, finite_diff_grad(f, params[k].value, 1e-5));
  }
}

}  // namespace

TEST_CASE("relu, abs and identity matmul evaluate by definition") {
  Graph g;
  Tensor x(1, 3);
  x << -1, 0, 2;
  CHECK(g.value(g.relu(g.input("x", x))) == (Tensor(1, 3) << 0, 0, 2).finished());
  Tensor y(1, 2);
  y << -2.5, 3;
  CHECK(g.value(g.abs(g.input("y", y))) == (Tensor(1, 2) << 2.5, 3).finished());
  Rng rng = make_stream(1, "t");
  const Tensor m = random_tensor(3, 4, rng);
  CHECK(g.value(g.matmul(g.constant(Tensor::Identity(3, 3)), g.constant(m))) == m);
}

TEST_CASE("sum of squares has gradient 2x") {
  Parameter x("x", (Tensor(1, 2) << 1, 2).finished());
  Graph g;
  g.backward(g.sum(g.square(g.parameter(x))));
  CHECK(x.grad == (Tensor(1, 2) << 2, 4).finished());
}

TEST_CASE("stop-gradient blocks the only path to the loss") {
  Parameter x("x", (Tensor(1, 2) << 1, 2).finished());
  Graph g;
  g.backward(g.sum(g.square(g.stop_gradient(g.parameter(x)))));
  CHECK(x.grad.isZero());
}

TEST_CASE("nodes off the loss path receive zero gradient") {
  Parameter a("a", Tensor::Ones(2, 2));
  Parameter b("b", Tensor::Ones(2, 2));
  Graph g;
  const NodeId na = g.parameter(a);
  const NodeId nb = g.parameter(b);
  const NodeId unused = g.relu(nb);
  g.backward(g.sum(na));
  CHECK(b.grad.isZero());
  CHECK(g.grad(unused).isZero());
}

TEST_CASE("placeholders are bound by forward and backward refuses unevaluated graphs") {
  Parameter w("w", (Tensor(2, 1) << 1, -1).finished());
  Graph g;
  const NodeId x = g.placeholder("x", 3, 2);
  const NodeId loss = g.mean(g.square(g.matmul(x, g.parameter(w))));
  CHECK_THROWS_AS(g.backward(loss), Error);
  Tensor xv(3, 2);
  xv << 1, 0, 0, 1, 2, 2;
  g.forward({{"x", xv}});
  CHECK(g.value(loss)(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(g.forward({{"x", Tensor::Zero(2, 2)}}), Error);
  CHECK_THROWS_AS(g.forward({{"nope", xv}}), Error);
}

TEST_CASE("shape errors name the node and its op") {
  Graph g;
  const NodeId a = g.constant(Tensor::Zero(2, 3));
  const NodeId b = g.constant(Tensor::Zero(2, 3));
  try {
    g.matmul(a, b);
    FAIL("expected a shape error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("node 2") != std::string::npos);
    CHECK(msg.find("matmul") != std::string::npos);
  }
}

TEST_CASE("non-finite outputs are errors") {
  Graph g;
  Tensor big = Tensor::Constant(1, 1, 1e300);
  CHECK_THROWS_AS(g.square(g.constant(big)), Error);
}

TEST_CASE("backward needs a scalar loss") {
  Parameter x("x", Tensor::Ones(2, 2));
  Graph g;
  CHECK_THROWS_AS(g.backward(g.relu(g.parameter(x))), Error);
}

TEST_CASE("finite differences of sum and x^2") {
  Rng rng = make_stream(2, "fd");
  const Tensor x = random_tensor(3, 2, rng);
  const Tensor g = finite_diff_grad([](const Tensor& t) { return t.sum(); }, x, 1e-5);
  CHECK((g.array() - 1.0).abs().maxCoeff() < 1e-9);
  const Tensor d = finite_diff_grad([](const Tensor& t) { return t(0, 0) * t(0, 0); }, Tensor::Constant(1, 1, 3.0), 1e-5);
  CHECK(std::abs(d(0, 0) - 6.0) <= 1e-6);
}

TEST_CASE("every op kind matches finite differences") {
  Rng rng = make_stream(3, "ops");
  // Values are kept away from the relu/abs kinks.
  auto away_from_zero = [&](Index r, Index c) {
    Tensor t = random_tensor(r, c, rng);
    for (Index i = 0; i < t.size(); ++i)
      if (std::abs(t.data()[i]) < 0.1) t.data()[i] = t.data()[i] < 0 ? -0.3 : 0.3;
    return t;
  };
  const Tensor w = random_tensor(3, 4, rng);
  auto params = [&](std::initializer_list<Tensor> ts) {
    std::vector<Parameter> out;
    int i = 0;
    for (const Tensor& t : ts) out.emplace_back("p" + std::to_string(i++), t);
    return out;
  };

  SUBCASE("matmul") {
    gradient_check(params({away_from_zero(2, 3), w}),
                   [](Graph& g, auto& l) { return g.sum(g.square(g.matmul(l[0], l[1]))); });
  }
  SUBCASE("add with row broadcast and subtract") {
    gradient_check(params({away_from_zero(3, 4), away_from_zero(1, 4), away_from_zero(3, 4)}), [](Graph& g, auto& l) {
      return g.sum(g.square(g.subtract(g.add(l[0], l[1]), l[2])));
    });
  }
  SUBCASE("subtract with broadcast row") {
    gradient_check(params({away_from_zero(3, 4), away_from_zero(1, 4)}),
                   [](Graph& g, auto& l) { return g.sum(g.square(g.subtract(l[0], l[1]))); });
  }
  SUBCASE("multiply and scale") {
    gradient_check(params({away_from_zero(2, 2), away_from_zero(2, 2)}),
                   [](Graph& g, auto& l) { return g.mean(g.scale(g.multiply(l[0], g.square(l[1])), -1.7)); });
  }
  SUBCASE("relu, abs and elu") {
    gradient_check(params({away_from_zero(3, 3)}), [](Graph& g, auto& l) {
      return g.sum(g.add(g.add(g.square(g.relu(l[0])), g.square(g.abs(l[0]))), g.square(g.elu(l[0]))));
    });
  }
  SUBCASE("concatenate on both axes") {
    gradient_check(params({away_from_zero(2, 3), away_from_zero(1, 3), away_from_zero(3, 2)}), [](Graph& g, auto& l) {
      const NodeId rows[] = {l[0], l[1]};
      const NodeId stacked = g.concatenate(rows, 0);
      const NodeId cols[] = {stacked, l[2]};
      return g.sum(g.square(g.concatenate(cols, 1)));
    });
  }
  SUBCASE("gather, select rows and select columns") {
    gradient_check(params({away_from_zero(4, 3)}), [](Graph& g, auto& l) {
      const NodeId picked = g.gather_entries(l[0], {2, 0, 1, 2});
      const NodeId rows = g.select_rows(l[0], {3, 3, 0});
      const NodeId cols = g.select_cols(l[0], {1, 1});
      return g.add(g.add(g.sum(g.square(picked)), g.sum(g.square(rows))), g.mean(g.square(cols)));
    });
  }
  SUBCASE("random two-layer relu network with mean-squared output") {
    gradient_check(params({away_from_zero(5, 4), random_tensor(4, 6, rng), random_tensor(1, 6, rng),
                           random_tensor(6, 2, rng), random_tensor(1, 2, rng)}),
                   [](Graph& g, auto& l) {
                     const NodeId h = g.relu(g.add(g.matmul(l[0], l[1]), l[2]));
                     return g.mean(g.square(g.add(g.matmul(h, l[3]), l[4])));
                   });
  }
}

TEST_CASE("forward and backward are bit-deterministic") {
  Rng rng = make_stream(4, "det");
  Parameter a("a", random_tensor(4, 4, rng));
  Parameter b("b", random_tensor(4, 1, rng));
  auto run = [&] {
    a.zero_grad();
    b.zero_grad();
    Graph g;
    const NodeId loss = g.mean(g.square(g.matmul(g.elu(g.parameter(a)), g.parameter(b))));
    g.backward(loss);
    return std::make_tuple(g.value(loss)(0, 0), Tensor(a.grad), Tensor(b.grad));
  };
  const auto first = run();
  const auto second = run();
  CHECK(std::get<0>(first) == std::get<0>(second));
  CHECK(std::get<1>(first) == std::get<1>(second));
  CHECK(std::get<2>(first) == std::get<2>(second));
}
