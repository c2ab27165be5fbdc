#pragma once

#include "agdo/theta.hpp"

namespace agdo {

struct NullVector {
    CVector vector;                  // unit norm, in the original column scaling
    Eigen::VectorXd singular_values; // of the equilibrated matrix, descending
    double gap = 0.0;                // sigma_min / sigma_second_min
};

/// Right singular vector of the smallest singular value of a (rows >= cols),
/// computed after scaling rows and then columns to unit norm. The kernel of a
/// is unaffected by the row scaling; the column scaling is undone on return.
NullVector smallest_singular_vector(const CMatrix& a);

} // namespace agdo
