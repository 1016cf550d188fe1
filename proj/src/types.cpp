#include "nammd/types.hpp"

#include "nammd/error.hpp"

#include <string>

namespace nammd {

Sample::Sample(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 2) {
    throw InputError("sample needs at least 2 points, got " + std::to_string(rows_.rows()));
  }
  if (rows_.cols() < 1) throw InputError("sample points must have dimension >= 1");
  if (!rows_.allFinite()) throw InputError("sample contains non-finite entries");
}

Sample Sample::concat(const Sample& a, const Sample& b) {
  if (a.dimension() != b.dimension()) {
    throw InputError("cannot pool samples of dimension " + std::to_string(a.dimension()) +
                     " and " + std::to_string(b.dimension()));
  }
  Matrix pooled(a.size() + b.size(), a.dimension());
  pooled.topRows(a.size()) = a.rows_;
  pooled.bottomRows(b.size()) = b.rows_;
  return Sample(std::move(pooled));
}

Sample Sample::select(std::span<const Index> indices) const {
  Matrix out(static_cast<Index>(indices.size()), dimension());
  for (Index i = 0; i < out.rows(); ++i) {
    const Index src = indices[static_cast<std::size_t>(i)];
    if (src < 0 || src >= size()) throw InputError("row index out of range");
    out.row(i) = rows_.row(src);
  }
  return Sample(std::move(out));
}

}  // namespace nammd
