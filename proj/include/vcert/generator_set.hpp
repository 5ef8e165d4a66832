#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "vcert/error.hpp"
#include "vcert/linalg.hpp"

namespace vcert {

/// Finite set of vectors whose cone hull encloses every value one Jacobian
/// column can take. Column indices are zero-based.
struct GeneratorSet {
    std::size_t column = 0;
    std::vector<Vector> vectors;

    std::size_t size() const noexcept { return vectors.size(); }

    /// Throws unless the set is non-empty and every vector is finite of length n.
    void validate(std::size_t n) const
    {
        const std::string where = "column " + std::to_string(column + 1);
        if (vectors.empty()) {
            throw InvalidArgument(where + ": empty generator set");
        }
        for (std::size_t k = 0; k < vectors.size(); ++k) {
            if (vectors[k].size() != n) {
                throw DimensionMismatch(where + ", generator " + std::to_string(k + 1) + ": expected "
                                        + std::to_string(n) + " coordinates, got "
                                        + std::to_string(vectors[k].size()));
            }
            if (!all_finite(vectors[k])) {
                throw InvalidArgument(where + ", generator " + std::to_string(k + 1) + ": non-finite coordinate");
            }
        }
    }

    /// Appends `v` unless an exactly equal vector is already present.
    void add_unique(Vector v)
    {
        if (std::find(vectors.begin(), vectors.end(), v) == vectors.end()) {
            vectors.push_back(std::move(v));
        }
    }
};

} // namespace vcert
