#pragma once

#include <array>

namespace vsbm {

// Fiber move for valued networks: add one interaction on dyad `add`, remove
// one on dyad `sub`.  Both dyads lie in the same block pair, which is what
// keeps the sufficient statistics fixed.
struct PoissonMove {
  std::array<int, 2> add;  // {u, v}, u < v
  std::array<int, 2> sub;
};

// Fiber move for labeled networks: on dyad d1 swap one interaction from
// label_from to label_to, on dyad d2 swap one from label_to to label_from.
struct LabeledMove {
  std::array<int, 2> d1;
  std::array<int, 2> d2;
  int label_to;
  int label_from;
};

}  // namespace vsbm
