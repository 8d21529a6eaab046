#pragma once

#include "wavenode/tensor.hpp"

namespace wavenode::kernels {

/// Runtime switch between the OpenMP kernels and the serial reference set.
/// Both produce bit-identical results (each output element is accumulated in
/// the same order); the switch exists for benchmarking and for pinning down
/// misbehaviour to one implementation.
void set_parallel(bool on);
bool parallel_enabled();

// All kernels operate on raw row-major buffers. Shapes follow the
// (batch, channels, length) convention used throughout the project:
//   x[b, c, l] = x[(b * C + c) * L + l]
// Convolution weights are [Cout, Cin, K]; transposed-convolution weights are
// [Cin, Cout, K]. `bias` pointers may be null.

#define WAVENODE_KERNEL_SET(ns)                                                                    \
    namespace ns {                                                                                 \
    void conv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci,        \
                i64 L, i64 Co, i64 K, i64 dil);                                                    \
    void conv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 L, i64 Co,    \
                      i64 K, i64 dil);                                                             \
    void flip_transpose_w(const real * w, real * out, i64 A, i64 Bdim, i64 K);                     \
    void tconv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci,       \
                 i64 T, i64 Co, i64 K, i64 stride, i64 pad);                                       \
    void tconv1d_dx(const real * gy, const real * w, real * gx, i64 B, i64 Ci, i64 T, i64 Co,      \
                    i64 K, i64 stride, i64 pad);                                                   \
    void tconv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 T, i64 Co,   \
                       i64 K, i64 stride, i64 pad);                                                \
    void add(const real * a, const real * b, real * y, i64 n);                                     \
    void sub(const real * a, const real * b, real * y, i64 n);                                     \
    void mul(const real * a, const real * b, real * y, i64 n);                                     \
    void affine(const real * x, real * y, i64 n, real scale, real shift);                          \
    void lincomb(const real * const * xs, const real * coeffs, i64 terms, real * y, i64 n);        \
    void tanh_(const real * x, real * y, i64 n);                                                   \
    void sigmoid_(const real * x, real * y, i64 n);                                                \
    void exp_(const real * x, real * y, i64 n);                                                    \
    void log_(const real * x, real * y, i64 n);                                                    \
    void log_abs(const real * x, real * y, i64 n);                                                 \
    void recip(const real * x, real * y, i64 n);                                                   \
    void clamp(const real * x, real * y, i64 n, real lo, real hi);                                 \
    void mul_channel(const real * x, const real * s, real * y, i64 B, i64 C, i64 L);               \
    void bcast_channel(const real * s, real * y, i64 B, i64 C, i64 L);                             \
    void bcast_batch(const real * v, real * y, i64 B, i64 C, i64 L);                               \
    void bcast_all(real v, real * y, i64 n);                                                       \
    real sum_all(const real * x, i64 n);                                                           \
    void sum_bl(const real * x, real * out, i64 B, i64 C, i64 L);                                  \
    void sum_cl(const real * x, real * out, i64 B, i64 C, i64 L);                                  \
    void squeeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q);                            \
    void unsqueeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q);                          \
    }

WAVENODE_KERNEL_SET(serial)
WAVENODE_KERNEL_SET(par)

#undef WAVENODE_KERNEL_SET

// Dispatching entry points used by the rest of the library.
void conv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 L,
            i64 Co, i64 K, i64 dil);
void conv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 L, i64 Co, i64 K,
                  i64 dil);
void flip_transpose_w(const real * w, real * out, i64 A, i64 Bdim, i64 K);
void tconv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 T,
             i64 Co, i64 K, i64 stride, i64 pad);
void tconv1d_dx(const real * gy, const real * w, real * gx, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                i64 stride, i64 pad);
void tconv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                   i64 stride, i64 pad);
void add(const real * a, const real * b, real * y, i64 n);
void sub(const real * a, const real * b, real * y, i64 n);
void mul(const real * a, const real * b, real * y, i64 n);
void affine(const real * x, real * y, i64 n, real scale, real shift);
void lincomb(const real * const * xs, const real * coeffs, i64 terms, real * y, i64 n);
void tanh_(const real * x, real * y, i64 n);
void sigmoid_(const real * x, real * y, i64 n);
void exp_(const real * x, real * y, i64 n);
void log_(const real * x, real * y, i64 n);
void log_abs(const real * x, real * y, i64 n);
void recip(const real * x, real * y, i64 n);
void clamp(const real * x, real * y, i64 n, real lo, real hi);
void mul_channel(const real * x, const real * s, real * y, i64 B, i64 C, i64 L);
void bcast_channel(const real * s, real * y, i64 B, i64 C, i64 L);
void bcast_batch(const real * v, real * y, i64 B, i64 C, i64 L);
void bcast_all(real v, real * y, i64 n);
real sum_all(const real * x, i64 n);
void sum_bl(const real * x, real * out, i64 B, i64 C, i64 L);
void sum_cl(const real * x, real * out, i64 B, i64 C, i64 L);
void squeeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q);
void unsqueeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q);

/// Per-channel mean and population standard deviation over the batch and
/// length axes. Used by data-dependent initialization; not differentiable.
void batch_stats(const Tensor & x, Tensor & mean, Tensor & stddev);

}  // namespace wavenode::kernels
