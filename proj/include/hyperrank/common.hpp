#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hyperrank {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SpMatrix = Eigen::SparseMatrix<Scalar>;
using VertexId = std::int32_t;

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent input data (files, vectors, tensors, graphs).
struct DataError : Error {
    using Error::Error;
};

/// Neumaier compensated accumulator. Used for fiber sums and inner-product
/// reductions where residual tolerances of 1e-10 and below are asserted.
class KahanSum {
public:
    void add(Scalar x) {
        const Scalar t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    Scalar value() const { return sum_ + comp_; }

private:
    Scalar sum_ = 0.0;
    Scalar comp_ = 0.0;
};

/// Checked n^(k-1). Throws DataError on overflow of the 63-bit index range.
std::uint64_t checked_fiber_count(VertexId n, int k);

}  // namespace hyperrank
