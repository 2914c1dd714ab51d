// Copyright 2026 The Lacuna Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lacuna/autodiff/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace lacuna::ad::kernels {

namespace {

inline size_t idx(int r, int ld, int c) {
  return static_cast<size_t>(r) * static_cast<size_t>(ld) + static_cast<size_t>(c);
}

}  // namespace

template <typename T>
void gemm_nn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate) {
  const long work = static_cast<long>(m) * n * k;
  // Four output rows share each pass over a row of B.
  const int blocks = (m + 3) / 4;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (int blk = 0; blk < blocks; ++blk) {
    const int i0 = blk * 4;
    const int rows = std::min(4, m - i0);
    T* c0 = c + idx(i0, n, 0);
    if (!accumulate) std::fill(c0, c0 + static_cast<size_t>(rows) * static_cast<size_t>(n), T(0));
    if (rows == 4) {
      T* c1 = c0 + n;
      T* c2 = c1 + n;
      T* c3 = c2 + n;
      const T* a0 = a + idx(i0, k, 0);
      const T* a1 = a0 + k;
      const T* a2 = a1 + k;
      const T* a3 = a2 + k;
      for (int p = 0; p < k; ++p) {
        const T v0 = a0[p], v1 = a1[p], v2 = a2[p], v3 = a3[p];
        const T* brow = b + idx(p, n, 0);
#pragma omp simd
        for (int j = 0; j < n; ++j) {
          const T bj = brow[j];
          c0[j] += v0 * bj;
          c1[j] += v1 * bj;
          c2[j] += v2 * bj;
          c3[j] += v3 * bj;
        }
      }
    } else {
      for (int r = 0; r < rows; ++r) {
        T* crow = c0 + idx(r, n, 0);
        const T* arow = a + idx(i0 + r, k, 0);
        for (int p = 0; p < k; ++p) {
          const T v = arow[p];
          const T* brow = b + idx(p, n, 0);
#pragma omp simd
          for (int j = 0; j < n; ++j) crow[j] += v * brow[j];
        }
      }
    }
  }
}

template <typename T>
void gemm_nt(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate) {
  const long work = static_cast<long>(m) * n * k;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    const T* arow = a + idx(i, k, 0);
    T* crow = c + idx(i, n, 0);
    for (int j = 0; j < n; ++j) {
      const T* brow = b + idx(j, k, 0);
      T s = 0;
#pragma omp simd reduction(+ : s)
      for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + s : s;
    }
  }
}

template <typename T>
void gemm_tn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate) {
  const long work = static_cast<long>(m) * n * k;
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    T* crow = c + idx(i, n, 0);
    if (!accumulate) std::fill(crow, crow + n, T(0));
    for (int p = 0; p < k; ++p) {
      const T v = a[idx(p, m, i)];
      if (v == T(0)) continue;
      const T* brow = b + idx(p, n, 0);
#pragma omp simd
      for (int j = 0; j < n; ++j) crow[j] += v * brow[j];
    }
  }
}

namespace reference {

template <typename T>
void gemm_nn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T s = 0;
      for (int p = 0; p < k; ++p) s += a[idx(i, k, p)] * b[idx(p, n, j)];
      c[idx(i, n, j)] = accumulate ? c[idx(i, n, j)] + s : s;
    }
  }
}

template <typename T>
void gemm_nt(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T s = 0;
      for (int p = 0; p < k; ++p) s += a[idx(i, k, p)] * b[idx(j, k, p)];
      c[idx(i, n, j)] = accumulate ? c[idx(i, n, j)] + s : s;
    }
  }
}

template <typename T>
void gemm_tn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T s = 0;
      for (int p = 0; p < k; ++p) s += a[idx(p, m, i)] * b[idx(p, n, j)];
      c[idx(i, n, j)] = accumulate ? c[idx(i, n, j)] + s : s;
    }
  }
}

template void gemm_nn<float>(int, int, int, const float*, const float*, float*, bool);
template void gemm_nn<double>(int, int, int, const double*, const double*, double*, bool);
template void gemm_nt<float>(int, int, int, const float*, const float*, float*, bool);
template void gemm_nt<double>(int, int, int, const double*, const double*, double*, bool);
template void gemm_tn<float>(int, int, int, const float*, const float*, float*, bool);
template void gemm_tn<double>(int, int, int, const double*, const double*, double*, bool);

}  // namespace reference

template void gemm_nn<float>(int, int, int, const float*, const float*, float*, bool);
template void gemm_nn<double>(int, int, int, const double*, const double*, double*, bool);
template void gemm_nt<float>(int, int, int, const float*, const float*, float*, bool);
template void gemm_nt<double>(int, int, int, const double*, const double*, double*, bool);
template void gemm_tn<float>(int, int, int, const float*, const float*, float*, bool);
template void gemm_tn<double>(int, int, int, const double*, const double*, double*, bool);

}  // namespace lacuna::ad::kernels
