#pragma once

#include "mapn/model.hpp"

#include <cstdint>

namespace mapn {

struct SyntheticSpec {
    std::uint64_t targetVariants = 1;
    /// Maximum nesting depth of alternative blocks (1 = no nesting).
    int maxDepth = 3;
    /// Maximum number of alternatives leaving one fork.
    int maxForkWidth = 4;
    /// Parallel processes with degrees {1, 2, 4}; each triples the count.
    int parallelCount = 0;
    std::uint64_t seed = 0;
    /// Adds a second metric "energy" (merge=sum, compose=sum).
    bool withEnergy = false;
};

/// Builds a well-formed acyclic graph whose unfolded variant count lies in
/// [targetVariants, 2 * targetVariants). The structure is a backbone chain
/// of alternative blocks (fork, alternatives, join) and parallel processes;
/// an alternative is a plain chain or a series of nested blocks. Every
/// process carries an integer "time" annotation in [1, 100] (merge=max,
/// compose=sum), and every parallel process a divide rule with small affine
/// overheads. Deterministic for a fixed spec. Throws GenerationError when
/// the request cannot be met.
Model generateSynthetic(const SyntheticSpec& spec);

} // namespace mapn
