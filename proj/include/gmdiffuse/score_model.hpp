#pragma once

#include <functional>
#include <memory>

#include "gmdiffuse/mixture_model.hpp"
#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

/// Score estimate s(y) ~ grad ln p_t(y) at one fixed noise time.
/// Implementations are immutable and safe to call concurrently.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual int dimension() const = 0;
  virtual Vector score(PointRef y) const = 0;
};

/// Exact score of a discrete mixture at time t.
class OracleScore final : public ScoreModel {
 public:
  OracleScore(const MixtureSpec& spec, double t) : oracle_(spec), t_(t) {}
  OracleScore(MixtureOracle oracle, double t) : oracle_(std::move(oracle)), t_(t) {}

  int dimension() const override { return oracle_.dimension(); }
  Vector score(PointRef y) const override { return oracle_.score(y, t_); }
  double time() const { return t_; }

 private:
  MixtureOracle oracle_;
  double t_;
};

class ZeroScore final : public ScoreModel {
 public:
  explicit ZeroScore(int n) : n_(n) {}
  int dimension() const override { return n_; }
  Vector score(PointRef) const override { return Vector::Zero(n_); }

 private:
  int n_;
};

class FunctionScore final : public ScoreModel {
 public:
  using Fn = std::function<Vector(PointRef)>;
  FunctionScore(int n, Fn fn) : n_(n), fn_(std::move(fn)) {}
  int dimension() const override { return n_; }
  Vector score(PointRef y) const override { return fn_(y); }

 private:
  int n_;
  Fn fn_;
};

}  // namespace gmdiffuse
