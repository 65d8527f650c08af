#pragma once

#include "projlab/dataset.hpp"
#include "projlab/matrix.hpp"

namespace projlab {

/// Low-dimensional coordinates produced by a projection, with the class
/// labels carried through from the input.
struct Embedding {
    Matrix coords;  // n x d
    LabelVector labels;
};

}  // namespace projlab
