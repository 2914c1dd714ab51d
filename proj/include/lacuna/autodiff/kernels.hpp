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

#ifndef LACUNA_AUTODIFF_KERNELS_HPP_
#define LACUNA_AUTODIFF_KERNELS_HPP_

namespace lacuna::ad::kernels {

// Row-major dense products. `accumulate` adds into C instead of overwriting.
// Each output row is computed by one thread with a fixed summation order, so
// results do not depend on the thread count.

// C[M,N] (+)= A[M,K] * B[K,N]
template <typename T>
void gemm_nn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate);

// C[M,N] (+)= A[M,K] * B[N,K]^T
template <typename T>
void gemm_nt(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate);

// C[M,N] (+)= A[K,M]^T * B[K,N]
template <typename T>
void gemm_tn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate);

// Serial textbook loops kept as the test oracle and benchmark baseline.
namespace reference {

template <typename T>
void gemm_nn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate);
template <typename T>
void gemm_nt(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate);
template <typename T>
void gemm_tn(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate);

}  // namespace reference

// Work (m*n*k) below which the kernels stay on the calling thread.
inline constexpr long kParallelThreshold = 1L << 16;

}  // namespace lacuna::ad::kernels

#endif  // LACUNA_AUTODIFF_KERNELS_HPP_
