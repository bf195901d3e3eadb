#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <string>

namespace emax {

/// Dense row-major matrix over an arbitrary scalar. Every activation, parameter
/// and gradient in the library is a 2-D array; vectors are 1 x n rows.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Tensor = MatrixX<double>;
using Index = Eigen::Index;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
std::string shape_string(const Eigen::DenseBase<Derived>& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

inline Tensor row_tensor(std::initializer_list<double> values) {
  Tensor t(1, static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) t(0, i++) = v;
  return t;
}

}  // namespace emax
