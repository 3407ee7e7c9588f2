// Column-major matrix product through the Fortran BLAS interface.
#pragma once

extern "C" void dgemm_(const char* ta, const char* tb, const int* m, const int* n, const int* k, const double* alpha,
                       const double* a, const int* lda, const double* b, const int* ldb, const double* beta, double* c,
                       const int* ldc);

namespace tat {

/// C (m x n) = A (m x k) * B (k x n), all column-major with tight leading dimensions.
inline void matmul(int m, int n, int k, const double* a, const double* b, double* c) {
  const double one = 1.0, zero = 0.0;
  dgemm_("N", "N", &m, &n, &k, &one, a, &m, b, &k, &zero, c, &m);
}

}  // namespace tat
