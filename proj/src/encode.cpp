#include "specrec/encode.hpp"

#include <Eigen/Core>

#include "specrec/errors.hpp"

namespace specrec {

void encode_into(const ResponseMatrix& R, const double* x, double* out) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> Rm(R.entries().data(), static_cast<Eigen::Index>(R.rows()),
                              static_cast<Eigen::Index>(R.cols()));
  Eigen::Map<const Eigen::VectorXd> xv(x, static_cast<Eigen::Index>(R.cols()));
  Eigen::Map<Eigen::VectorXd> yv(out, static_cast<Eigen::Index>(R.rows()));
  yv.noalias() = Rm * xv;
}

EncodedSignal encode(const ResponseMatrix& R, const Spectrum& x) {
  if (R.cols() != x.size())
    throw DimensionMismatch("encode: R has " + std::to_string(R.cols()) +
                            " columns but spectrum has " + std::to_string(x.size()) +
                            " samples");
  std::vector<double> y(R.rows());
  encode_into(R, x.values().data(), y.data());
  return EncodedSignal::raw(std::move(y));
}

}  // namespace specrec
