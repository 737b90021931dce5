#pragma once

#include <Eigen/Core>

namespace qcdma::fft {

/// Unnormalized forward DFT: out[m] = sum_k in[k] exp(-2 pi i k m / n).
/// Plans are cached per length and shared across threads; `in` and `out`
/// must not alias.
void forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

/// Unnormalized inverse DFT (positive exponent, no 1/n factor).
void backward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

}  // namespace qcdma::fft
