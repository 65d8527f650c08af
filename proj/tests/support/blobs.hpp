#pragma once

#include <cstddef>
#include <cstdint>

#include "projlab/dataset.hpp"

namespace testsupport {

/// Deterministic Gaussian blob generator: `clusters` centers drawn from a
/// seeded standard normal and rescaled so the minimum pairwise center
/// distance equals `separation`, then `per_cluster` points per center with
/// isotropic noise of the given sigma. Labels follow cluster membership.
projlab::Dataset make_blobs(std::size_t clusters, std::size_t per_cluster, std::size_t dims,
                            double separation, double sigma, std::uint64_t seed);

/// Appends `noise_dims` pure-noise columns (zero-mean normal with the given
/// sigma) to every row.
projlab::Dataset append_noise_columns(const projlab::Dataset& data, std::size_t noise_dims,
                                      double sigma, std::uint64_t seed);

/// Hierarchical pair structure with 2*groups classes over coarse_dims +
/// fine_dims features. Groups are well-separated mean clusters confined to
/// the coarse dims; the two classes inside a group differ only by a
/// +-fine_offset/2 per-dim shift on the group's own slice of the fine dims.
/// Coarse dims carry the group structure, fine dims the within-group class
/// structure, so every feature column is class-relevant. fine_dims must be
/// divisible by groups.
projlab::Dataset make_paired_blobs(std::size_t groups, std::size_t per_class,
                                   std::size_t coarse_dims, std::size_t fine_dims,
                                   double group_separation, double fine_offset, double sigma,
                                   std::uint64_t seed);

}  // namespace testsupport
