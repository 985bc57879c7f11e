#pragma once

#include <cstdint>
#include <stdexcept>

#include "gmdiffuse/mixture_model.hpp"
#include "gmdiffuse/types.hpp"

namespace gmdiffuse {

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sequential supply of P_0 samples. Every draw returns samples not handed
/// out before, and consumed() counts everything drawn so far.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual int dimension() const = 0;
  virtual PointSet draw(std::size_t count) = 0;
  virtual std::size_t consumed() const = 0;
};

/// Fresh draws from a mixture; batch b uses seed derive_seed(seed, b).
class MixtureSampleSource final : public SampleSource {
 public:
  MixtureSampleSource(MixtureSpec spec, std::uint64_t seed);
  int dimension() const override { return spec_.n; }
  PointSet draw(std::size_t count) override;
  std::size_t consumed() const override { return consumed_; }

 private:
  MixtureSpec spec_;
  std::uint64_t seed_;
  std::uint64_t batch_ = 0;
  std::size_t consumed_ = 0;
};

/// Rows of a fixed table handed out in order; throws InsufficientSamples
/// once exhausted.
class TableSampleSource final : public SampleSource {
 public:
  explicit TableSampleSource(PointSet rows);
  int dimension() const override { return static_cast<int>(rows_.cols()); }
  PointSet draw(std::size_t count) override;
  std::size_t consumed() const override { return next_; }
  std::size_t remaining() const { return static_cast<std::size_t>(rows_.rows()) - next_; }

 private:
  PointSet rows_;
  std::size_t next_ = 0;
};

}  // namespace gmdiffuse
