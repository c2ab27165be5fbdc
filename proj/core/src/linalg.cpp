#include "agdo/linalg.hpp"

#include "agdo/errors.hpp"

namespace agdo {

NullVector smallest_singular_vector(const CMatrix& a)
{
    if (a.cols() < 2 || a.rows() < a.cols()) {
        throw InvalidArgument("smallest_singular_vector: need rows >= cols >= 2");
    }
    CMatrix scaled = a;
    for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
        const double norm = scaled.row(r).norm();
        if (norm > 0.0) scaled.row(r) /= norm;
    }
    Eigen::VectorXd col_scale(scaled.cols());
    for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
        const double norm = scaled.col(c).norm();
        col_scale[c] = norm > 0.0 ? 1.0 / norm : 1.0;
        scaled.col(c) *= col_scale[c];
    }

    Eigen::JacobiSVD<CMatrix> svd(scaled, Eigen::ComputeFullV);
    NullVector out;
    out.singular_values = svd.singularValues();
    const Eigen::Index n = out.singular_values.size();
    const double second = out.singular_values[n - 2];
    out.gap = second > 0.0 ? out.singular_values[n - 1] / second : 1.0;

    CVector y = svd.matrixV().col(n - 1);
    out.vector = (col_scale.cast<cplx>().array() * y.array()).matrix();
    out.vector.normalize();
    return out;
}

} // namespace agdo
