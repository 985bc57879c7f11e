#include <doctest.h>

#include <numeric>

#include "gmdiffuse/kernels.hpp"
#include "gmdiffuse/reverse_sampler.hpp"
#include "gmdiffuse/rng.hpp"
#include "gmdiffuse/score_regression.hpp"
#include "support.hpp"

using namespace gmdiffuse;
using namespace gmdiffuse::test;

namespace {

PointSet cloud(std::size_t m, int n, std::uint64_t seed) {
  auto gen = make_stream(seed, 0);
  std::normal_distribution<double> normal;
  PointSet p(static_cast<Eigen::Index>(m), n);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (int c = 0; c < n; ++c) p(i, c) = 3.0 * normal(gen);
  }
  return p;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree") {
  const auto spec = from_means({{0.0, 0.0, 0.0}, {4.0, 1.0, 0.0}, {-2.0, 3.0, 1.0}});
  const PointSet ys = cloud(3000, 3, 1);

  const OracleScore score(spec, 0.4);
  CHECK(score_batch(score, ys, Exec::serial) == score_batch(score, ys, Exec::parallel));

  const PointSet centers = spec.means();
  CHECK(assign_cells(centers, ys, Exec::serial) == assign_cells(centers, ys, Exec::parallel));

  const FeatureBasis basis(3, 4, 1.4);
  std::vector<std::size_t> rows(1500);
  std::iota(rows.begin(), rows.end(), 700);
  const Vector center = vec({0.5, -0.5, 0.2});
  const Matrix a = feature_matrix(basis, ys, rows, center, Exec::serial);
  const Matrix b = feature_matrix(basis, ys, rows, center, Exec::parallel);
  CHECK(a == b);
  CHECK(a.rows() == 1500);
  CHECK(a.cols() == static_cast<Eigen::Index>(basis.size()));

  const PointSet targets = cloud(3000, 3, 2);
  Matrix z(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t r = 0; r < rows.size(); ++r) z.row(static_cast<Eigen::Index>(r)) = targets.row(static_cast<Eigen::Index>(rows[r]));
  const auto fast = normal_equations(b, z);
  const auto slow = normal_equations_serial(basis, ys, targets, rows, center);
  CHECK((fast.gram - slow.gram).norm() <= 1e-10 * slow.gram.norm());
  CHECK((fast.rhs - slow.rhs).norm() <= 1e-10 * slow.rhs.norm());
  CHECK(fast.gram.isApprox(fast.gram.transpose()));
}

TEST_CASE("batch failures report the lowest failing index") {
  FunctionScore nan_after(1, [](PointRef y) {
    Vector v(1);
    v[0] = y[0] > 5.0 ? std::nan("") : 0.0;
    return v;
  });
  PointSet ys(10, 1);
  for (Eigen::Index i = 0; i < 10; ++i) ys(i, 0) = static_cast<double>(i);
  for (Exec e : {Exec::serial, Exec::parallel}) {
    try {
      score_batch(nan_after, ys, e);
      FAIL("expected a point error");
    } catch (const PointError& err) {
      CHECK(err.index() == 6);
    }
  }
  FunctionScore wrong_dim(1, [](PointRef) { return Vector::Zero(2).eval(); });
  CHECK_THROWS_AS(score_batch(wrong_dim, ys), PointError);
}

TEST_CASE("sampler is bit identical across execution modes") {
  const auto spec = from_means({{-3.0, 0.0}, {3.0, 1.0}});
  const auto schedule = build_schedule(0.5, 1.0, 2, spec.second_moment());
  const auto stack = oracle_stack(spec, schedule);
  SamplerOptions serial, parallel;
  serial.exec = Exec::serial;
  parallel.exec = Exec::parallel;
  CHECK(generate(stack, schedule, 257, 3, serial) == generate(stack, schedule, 257, 3, parallel));
}
