#include "gmdiffuse/sample_source.hpp"

#include <string>

#include "gmdiffuse/rng.hpp"

namespace gmdiffuse {

MixtureSampleSource::MixtureSampleSource(MixtureSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
}

PointSet MixtureSampleSource::draw(std::size_t count) {
  PointSet out = sample_mixture(spec_, count, derive_seed(seed_, batch_++));
  consumed_ += count;
  return out;
}

TableSampleSource::TableSampleSource(PointSet rows) : rows_(std::move(rows)) {}

PointSet TableSampleSource::draw(std::size_t count) {
  if (count > remaining()) {
    throw InsufficientSamples("sample table exhausted: requested " + std::to_string(count) +
                              ", " + std::to_string(remaining()) + " left of " +
                              std::to_string(rows_.rows()));
  }
  PointSet out = rows_.middleRows(static_cast<Eigen::Index>(next_), static_cast<Eigen::Index>(count));
  next_ += count;
  return out;
}

}  // namespace gmdiffuse
