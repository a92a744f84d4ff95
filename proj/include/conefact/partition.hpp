#pragma once

#include "conefact/polyhedron.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace conefact {

/// Subset of point indices realizable as P ∩ X, together with the
/// halfspaces that realize it. Masks cap the ground set at 64 points.
struct SubsetWitness {
    std::uint64_t mask = 0;
    std::vector<Halfspace> halfspaces;
};

/// Ordered partition of {0..m-1} induced by a polyhedral covering with the
/// subtract-earlier-parts rule.
struct PolyPartition {
    int ground_size = 0;
    std::vector<std::vector<int>> parts;
    std::vector<HPolyhedron> inducing_polyhedra;
};

/// All distinct subsets of the form {i : <a, x_i> >= b}. Duplicate points
/// are collapsed first and always travel together. Enumeration walks the
/// cells of the lifted arrangement with LP-certified sign vectors, so no
/// perturbation tuning is involved; the count is checked against the
/// classical dichotomy bound.
std::vector<SubsetWitness> halfspace_subsets(const std::vector<std::vector<double>>& points);

/// Lazy stream over distinct subsets P ∩ X where P is an intersection of
/// at most k2 halfspaces; level t of the closure adds t-fold intersections.
class PolyhedronSubsetStream {
  public:
    PolyhedronSubsetStream(const std::vector<std::vector<double>>& points, int k2);

    std::optional<SubsetWitness> next();

    /// Drains the stream (bounded by 2^m distinct subsets).
    std::vector<SubsetWitness> drain();

  private:
    bool advance_level();

    std::vector<SubsetWitness> base_;
    std::vector<SubsetWitness> family_;
    std::set<std::uint64_t> seen_;
    std::size_t level_begin_ = 0; // first index of the newest level
    std::size_t cursor_ = 0;
    int level_ = 1;
    int k2_ = 1;
};

enum class PartitionOrder { CoarseFirst };

/// Lazy stream of all distinct (k1,k2)-polyhedral partitions, coarse
/// (fewer parts) first; every emitted partition is validated.
class PartitionStream {
  public:
    PartitionStream(const std::vector<std::vector<double>>& points, int k1, int k2,
                    PartitionOrder order = PartitionOrder::CoarseFirst);

    std::optional<PolyPartition> next();

    /// Partitions with exactly `parts` parts, deduplicated against
    /// everything produced so far (used by the factorizer's k+l ordering).
    std::vector<PolyPartition> partitions_with_parts(int parts);

    int max_parts() const { return k1_eff_; }
    std::size_t subset_count() const { return subsets_.size(); }

  private:
    void dfs(int target, int depth, std::uint64_t covered, std::vector<int>& chosen,
             std::vector<PolyPartition>& out);
    PolyPartition assemble(const std::vector<int>& chosen) const;

    std::vector<SubsetWitness> subsets_;
    std::uint64_t full_mask_ = 0;
    int m_ = 0;
    int k1_eff_ = 0;
    std::set<std::vector<std::uint64_t>> emitted_;
    std::vector<PolyPartition> pending_;
    std::size_t pending_cursor_ = 0;
    int current_parts_ = 0;
    std::uint64_t emitted_count_ = 0;
};

} // namespace conefact
