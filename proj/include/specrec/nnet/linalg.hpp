#pragma once

#include <Eigen/Core>
#include <cstddef>

namespace specrec::nn::linalg {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<RowMat>;
using MapC = Eigen::Map<const RowMat>;
using Idx = Eigen::Index;

// C[m x n] = A[m x k] B[k x n]
inline void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  MapM(c, Idx(m), Idx(n)).noalias() =
      MapC(a, Idx(m), Idx(k)) * MapC(b, Idx(k), Idx(n));
}

// C[m x n] = A[m x k] B^T, with B stored [n x k]
inline void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  MapM(c, Idx(m), Idx(n)).noalias() =
      MapC(a, Idx(m), Idx(k)) * MapC(b, Idx(n), Idx(k)).transpose();
}

// C[m x n] = A^T B, with A stored [k x m]
inline void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  MapM(c, Idx(m), Idx(n)).noalias() =
      MapC(a, Idx(k), Idx(m)).transpose() * MapC(b, Idx(k), Idx(n));
}

// C += A^T B (gradient accumulation variant)
inline void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m,
                        std::size_t k, std::size_t n) {
  MapM(c, Idx(m), Idx(n)).noalias() +=
      MapC(a, Idx(k), Idx(m)).transpose() * MapC(b, Idx(k), Idx(n));
}

}  // namespace specrec::nn::linalg
