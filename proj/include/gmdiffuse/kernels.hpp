#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmdiffuse/hermite.hpp"
#include "gmdiffuse/score_model.hpp"
#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

/// Execution policy for the batch kernels. `serial` runs the plain
/// reference loop and is kept for testing and benchmarking.
enum class Exec { serial, parallel };

/// Failure while processing one point of a batch.
class PointError : public std::runtime_error {
 public:
  PointError(std::size_t index, const std::string& what)
      : std::runtime_error("point " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Runs body(i) for i in [0, count). If any call throws, the exception of
/// the lowest failing index is reported as a PointError after the loop.
template <typename Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  std::size_t failed = std::numeric_limits<std::size_t>::max();
  std::string message;
  const auto n = static_cast<std::ptrdiff_t>(count);
  auto run = [&](std::ptrdiff_t i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
#pragma omp critical(gmdiffuse_for_each_index)
      if (static_cast<std::size_t>(i) < failed) {
        failed = static_cast<std::size_t>(i);
        message = e.what();
      }
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
  }
  if (failed != std::numeric_limits<std::size_t>::max()) throw PointError(failed, message);
}

/// One score per row. Non-finite scores are reported as PointError.
PointSet score_batch(const ScoreModel& model, const PointSet& ys, Exec exec = Exec::parallel);

/// Nearest center per row, lowest index on ties.
std::size_t nearest_center(const PointSet& centers, PointRef y);
std::vector<std::size_t> assign_cells(const PointSet& centers, const PointSet& ys,
                                      Exec exec = Exec::parallel);

/// Feature rows phi(y_r - center) for the listed rows of `ys`.
Matrix feature_matrix(const FeatureBasis& basis, const PointSet& ys,
                      std::span<const std::size_t> rows, PointRef center,
                      Exec exec = Exec::parallel);

/// Gram matrix Phi^T Phi and right-hand side Phi^T Z of a least-squares cell.
struct NormalEquations {
  Matrix gram;
  Matrix rhs;
};

/// Forms Phi^T Phi and Phi^T Z from an assembled feature matrix with
/// dense rank-k updates.
NormalEquations normal_equations(const Matrix& features, const Matrix& targets);

/// Reference: accumulates phi phi^T and phi z^T one sample at a time.
NormalEquations normal_equations_serial(const FeatureBasis& basis, const PointSet& ys,
                                        const PointSet& targets,
                                        std::span<const std::size_t> rows, PointRef center);

}  // namespace gmdiffuse
