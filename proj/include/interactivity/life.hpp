#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "interactivity/types.hpp"

namespace interactivity::ulenv {

// Life on the infinite grid, sparse set-of-live-cells representation.
// Finite support is the state-space invariant; blanks are never stored.
using Cell = std::pair<long, long>;
using CellSet = std::set<Cell>;

/// One step of B3/S23. Support stays finite.
CellSet life_step(const CellSet& state);

CellSet life_step_n(CellSet state, int n);

/// Restriction of a state to a finite index set, blanks included within F.
std::map<Cell, int> restrict_state(const CellSet& state, const CellSet& F);

/// k-horizon boundary of F: cells whose values, together with F, determine
/// the k-step evolution on F. For Life this is the Chebyshev-radius-k
/// neighbourhood of F minus F itself.
CellSet life_boundary(const CellSet& F, int k);

struct LocalityVerdict {
  bool ok = true;
  int failed_trial = -1;
  CellSet state_a;  // counterexample pair on failure
  CellSet state_b;
};

/// Randomized check that F plus the given boundary determines the
/// `steps`-step evolution on F: random state pairs agree on F and the
/// boundary, differ arbitrarily elsewhere in a surrounding window.
LocalityVerdict verify_locality(const CellSet& F, int steps, const CellSet& boundary, int trials,
                                std::uint64_t seed);

/// Uses the canonical boundary life_boundary(F, k). k = 0 checks a single
/// step with no boundary information at all (fails for Life).
LocalityVerdict verify_locality(const CellSet& F, int k, int trials, std::uint64_t seed);

// Pattern files: one "x y" live cell per line; '#' starts a comment.
CellSet parse_cells(std::istream& in);
CellSet load_pattern(const std::string& path);
void write_pattern(std::ostream& out, const CellSet& state);

}  // namespace interactivity::ulenv
