#include "wavenode/kernels.hpp"

#include <atomic>
#include <cmath>

namespace wavenode::kernels {

static std::atomic<bool> g_parallel{true};

void set_parallel(bool on) { g_parallel.store(on); }
bool parallel_enabled() { return g_parallel.load(); }

// Fixed chunk size for full reductions. Both implementations reduce chunks in
// the same order, so results are bit-identical regardless of thread count.
static constexpr i64 kReduceChunk = 4096;

// Work thresholds below which the OpenMP kernels stay on one thread.
static constexpr i64 kGrainElems = 1 << 14;

// ---------------------------------------------------------------------------
// Serial reference implementations.
// ---------------------------------------------------------------------------

namespace serial {

void conv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 L,
            i64 Co, i64 K, i64 dil) {
    const i64 center = (K - 1) / 2;
    for (i64 b = 0; b < B; ++b) {
        for (i64 co = 0; co < Co; ++co) {
            for (i64 l = 0; l < L; ++l) {
                real acc = bias ? bias[co] : 0.0;
                for (i64 ci = 0; ci < Ci; ++ci) {
                    const real * xr = x + (b * Ci + ci) * L;
                    const real * wr = w + (co * Ci + ci) * K;
                    for (i64 k = 0; k < K; ++k) {
                        i64 idx = l + dil * (k - center);
                        if (idx >= 0 && idx < L) acc += wr[k] * xr[idx];
                    }
                }
                y[(b * Co + co) * L + l] = acc;
            }
        }
    }
}

void conv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 L, i64 Co, i64 K,
                  i64 dil) {
    const i64 center = (K - 1) / 2;
    for (i64 co = 0; co < Co; ++co) {
        for (i64 ci = 0; ci < Ci; ++ci) {
            for (i64 k = 0; k < K; ++k) {
                real acc = 0.0;
                for (i64 b = 0; b < B; ++b) {
                    const real * xr = x + (b * Ci + ci) * L;
                    const real * gr = gy + (b * Co + co) * L;
                    for (i64 l = 0; l < L; ++l) {
                        i64 idx = l + dil * (k - center);
                        if (idx >= 0 && idx < L) acc += gr[l] * xr[idx];
                    }
                }
                gw[(co * Ci + ci) * K + k] = acc;
            }
        }
    }
}

void flip_transpose_w(const real * w, real * out, i64 A, i64 Bdim, i64 K) {
    for (i64 a = 0; a < A; ++a)
        for (i64 b = 0; b < Bdim; ++b)
            for (i64 k = 0; k < K; ++k) out[(b * A + a) * K + k] = w[(a * Bdim + b) * K + (K - 1 - k)];
}

void tconv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 T,
             i64 Co, i64 K, i64 stride, i64 pad) {
    const i64 Lo = (T - 1) * stride + K - 2 * pad;
    for (i64 b = 0; b < B; ++b) {
        for (i64 co = 0; co < Co; ++co) {
            for (i64 m = 0; m < Lo; ++m) {
                real acc = bias ? bias[co] : 0.0;
                for (i64 k = 0; k < K; ++k) {
                    i64 ts = m + pad - k;
                    if (ts < 0 || ts % stride != 0) continue;
                    i64 t = ts / stride;
                    if (t >= T) continue;
                    for (i64 ci = 0; ci < Ci; ++ci)
                        acc += w[(ci * Co + co) * K + k] * x[(b * Ci + ci) * T + t];
                }
                y[(b * Co + co) * Lo + m] = acc;
            }
        }
    }
}

void tconv1d_dx(const real * gy, const real * w, real * gx, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                i64 stride, i64 pad) {
    const i64 Lo = (T - 1) * stride + K - 2 * pad;
    for (i64 b = 0; b < B; ++b) {
        for (i64 ci = 0; ci < Ci; ++ci) {
            for (i64 t = 0; t < T; ++t) {
                real acc = 0.0;
                for (i64 co = 0; co < Co; ++co) {
                    const real * gr = gy + (b * Co + co) * Lo;
                    const real * wr = w + (ci * Co + co) * K;
                    for (i64 k = 0; k < K; ++k) {
                        i64 m = t * stride + k - pad;
                        if (m >= 0 && m < Lo) acc += wr[k] * gr[m];
                    }
                }
                gx[(b * Ci + ci) * T + t] = acc;
            }
        }
    }
}

void tconv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                   i64 stride, i64 pad) {
    const i64 Lo = (T - 1) * stride + K - 2 * pad;
    for (i64 ci = 0; ci < Ci; ++ci) {
        for (i64 co = 0; co < Co; ++co) {
            for (i64 k = 0; k < K; ++k) {
                real acc = 0.0;
                for (i64 b = 0; b < B; ++b) {
                    const real * xr = x + (b * Ci + ci) * T;
                    const real * gr = gy + (b * Co + co) * Lo;
                    for (i64 t = 0; t < T; ++t) {
                        i64 m = t * stride + k - pad;
                        if (m >= 0 && m < Lo) acc += xr[t] * gr[m];
                    }
                }
                gw[(ci * Co + co) * K + k] = acc;
            }
        }
    }
}

void add(const real * a, const real * b, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = a[i] + b[i];
}
void sub(const real * a, const real * b, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = a[i] - b[i];
}
void mul(const real * a, const real * b, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = a[i] * b[i];
}
void affine(const real * x, real * y, i64 n, real scale, real shift) {
    for (i64 i = 0; i < n; ++i) y[i] = scale * x[i] + shift;
}
void lincomb(const real * const * xs, const real * coeffs, i64 terms, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) {
        real acc = 0.0;
        for (i64 t = 0; t < terms; ++t) acc += coeffs[t] * xs[t][i];
        y[i] = acc;
    }
}
void tanh_(const real * x, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}
void sigmoid_(const real * x, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}
void exp_(const real * x, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}
void log_(const real * x, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = std::log(x[i]);
}
void log_abs(const real * x, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = std::log(std::fabs(x[i]));
}
void recip(const real * x, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = 1.0 / x[i];
}
void clamp(const real * x, real * y, i64 n, real lo, real hi) {
    for (i64 i = 0; i < n; ++i) y[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
}
void mul_channel(const real * x, const real * s, real * y, i64 B, i64 C, i64 L) {
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < C; ++c) {
            const real sc = s[c];
            const real * xr = x + (b * C + c) * L;
            real * yr = y + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) yr[l] = sc * xr[l];
        }
}
void bcast_channel(const real * s, real * y, i64 B, i64 C, i64 L) {
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < C; ++c) {
            real * yr = y + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) yr[l] = s[c];
        }
}
void bcast_batch(const real * v, real * y, i64 B, i64 C, i64 L) {
    for (i64 b = 0; b < B; ++b) {
        real * yr = y + b * C * L;
        for (i64 i = 0; i < C * L; ++i) yr[i] = v[b];
    }
}
void bcast_all(real v, real * y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = v;
}

real sum_all(const real * x, i64 n) {
    const i64 nch = (n + kReduceChunk - 1) / kReduceChunk;
    real total = 0.0;
    for (i64 ch = 0; ch < nch; ++ch) {
        i64 lo = ch * kReduceChunk, hi = std::min(n, lo + kReduceChunk);
        real part = 0.0;
        for (i64 i = lo; i < hi; ++i) part += x[i];
        total += part;
    }
    return total;
}

void sum_bl(const real * x, real * out, i64 B, i64 C, i64 L) {
    for (i64 c = 0; c < C; ++c) {
        real acc = 0.0;
        for (i64 b = 0; b < B; ++b) {
            const real * xr = x + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) acc += xr[l];
        }
        out[c] = acc;
    }
}

void sum_cl(const real * x, real * out, i64 B, i64 C, i64 L) {
    for (i64 b = 0; b < B; ++b) {
        real acc = 0.0;
        const real * xr = x + b * C * L;
        for (i64 i = 0; i < C * L; ++i) acc += xr[i];
        out[b] = acc;
    }
}

void squeeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q) {
    const i64 Lq = L / q;
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < C; ++c)
            for (i64 l = 0; l < Lq; ++l)
                for (i64 r = 0; r < q; ++r)
                    y[(b * C * q + c * q + r) * Lq + l] = x[(b * C + c) * L + l * q + r];
}

void unsqueeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q) {
    // x is [B, C, L]; y is [B, C/q, L*q]; inverse of squeeze().
    const i64 Cq = C / q;
    const i64 Lq = L * q;
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < Cq; ++c)
            for (i64 l = 0; l < L; ++l)
                for (i64 r = 0; r < q; ++r)
                    y[(b * Cq + c) * Lq + l * q + r] = x[(b * C + c * q + r) * L + l];
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP implementations. Every output element is accumulated in the same
// order as the serial reference, so the two sets agree bit-for-bit.
// ---------------------------------------------------------------------------

namespace par {

void conv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 L,
            i64 Co, i64 K, i64 dil) {
    const i64 center = (K - 1) / 2;
    const i64 work = B * Co * L * Ci * K;
#pragma omp parallel for collapse(2) schedule(static) if (work > kGrainElems)
    for (i64 b = 0; b < B; ++b) {
        for (i64 co = 0; co < Co; ++co) {
            for (i64 l = 0; l < L; ++l) {
                real acc = bias ? bias[co] : 0.0;
                for (i64 ci = 0; ci < Ci; ++ci) {
                    const real * xr = x + (b * Ci + ci) * L;
                    const real * wr = w + (co * Ci + ci) * K;
                    for (i64 k = 0; k < K; ++k) {
                        i64 idx = l + dil * (k - center);
                        if (idx >= 0 && idx < L) acc += wr[k] * xr[idx];
                    }
                }
                y[(b * Co + co) * L + l] = acc;
            }
        }
    }
}

void conv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 L, i64 Co, i64 K,
                  i64 dil) {
    const i64 center = (K - 1) / 2;
    const i64 work = B * Co * Ci * K * L;
#pragma omp parallel for collapse(2) schedule(static) if (work > kGrainElems)
    for (i64 co = 0; co < Co; ++co) {
        for (i64 ci = 0; ci < Ci; ++ci) {
            for (i64 k = 0; k < K; ++k) {
                real acc = 0.0;
                for (i64 b = 0; b < B; ++b) {
                    const real * xr = x + (b * Ci + ci) * L;
                    const real * gr = gy + (b * Co + co) * L;
                    for (i64 l = 0; l < L; ++l) {
                        i64 idx = l + dil * (k - center);
                        if (idx >= 0 && idx < L) acc += gr[l] * xr[idx];
                    }
                }
                gw[(co * Ci + ci) * K + k] = acc;
            }
        }
    }
}

void flip_transpose_w(const real * w, real * out, i64 A, i64 Bdim, i64 K) {
    serial::flip_transpose_w(w, out, A, Bdim, K);  // pure permutation, never hot
}

void tconv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 T,
             i64 Co, i64 K, i64 stride, i64 pad) {
    const i64 Lo = (T - 1) * stride + K - 2 * pad;
    const i64 work = B * Co * Lo * Ci * (K / std::max<i64>(stride, 1) + 1);
#pragma omp parallel for collapse(2) schedule(static) if (work > kGrainElems)
    for (i64 b = 0; b < B; ++b) {
        for (i64 co = 0; co < Co; ++co) {
            for (i64 m = 0; m < Lo; ++m) {
                real acc = bias ? bias[co] : 0.0;
                for (i64 k = 0; k < K; ++k) {
                    i64 ts = m + pad - k;
                    if (ts < 0 || ts % stride != 0) continue;
                    i64 t = ts / stride;
                    if (t >= T) continue;
                    for (i64 ci = 0; ci < Ci; ++ci)
                        acc += w[(ci * Co + co) * K + k] * x[(b * Ci + ci) * T + t];
                }
                y[(b * Co + co) * Lo + m] = acc;
            }
        }
    }
}

void tconv1d_dx(const real * gy, const real * w, real * gx, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                i64 stride, i64 pad) {
    const i64 Lo = (T - 1) * stride + K - 2 * pad;
    const i64 work = B * Ci * T * Co * K;
#pragma omp parallel for collapse(2) schedule(static) if (work > kGrainElems)
    for (i64 b = 0; b < B; ++b) {
        for (i64 ci = 0; ci < Ci; ++ci) {
            for (i64 t = 0; t < T; ++t) {
                real acc = 0.0;
                for (i64 co = 0; co < Co; ++co) {
                    const real * gr = gy + (b * Co + co) * Lo;
                    const real * wr = w + (ci * Co + co) * K;
                    for (i64 k = 0; k < K; ++k) {
                        i64 m = t * stride + k - pad;
                        if (m >= 0 && m < Lo) acc += wr[k] * gr[m];
                    }
                }
                gx[(b * Ci + ci) * T + t] = acc;
            }
        }
    }
}

void tconv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                   i64 stride, i64 pad) {
    const i64 Lo = (T - 1) * stride + K - 2 * pad;
    const i64 work = Ci * Co * K * B * T;
#pragma omp parallel for collapse(2) schedule(static) if (work > kGrainElems)
    for (i64 ci = 0; ci < Ci; ++ci) {
        for (i64 co = 0; co < Co; ++co) {
            for (i64 k = 0; k < K; ++k) {
                real acc = 0.0;
                for (i64 b = 0; b < B; ++b) {
                    const real * xr = x + (b * Ci + ci) * T;
                    const real * gr = gy + (b * Co + co) * Lo;
                    for (i64 t = 0; t < T; ++t) {
                        i64 m = t * stride + k - pad;
                        if (m >= 0 && m < Lo) acc += xr[t] * gr[m];
                    }
                }
                gw[(ci * Co + co) * K + k] = acc;
            }
        }
    }
}

void add(const real * a, const real * b, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 i = 0; i < n; ++i) y[i] = a[i] + b[i];
}
void sub(const real * a, const real * b, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 i = 0; i < n; ++i) y[i] = a[i] - b[i];
}
void mul(const real * a, const real * b, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 i = 0; i < n; ++i) y[i] = a[i] * b[i];
}
void affine(const real * x, real * y, i64 n, real scale, real shift) {
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 i = 0; i < n; ++i) y[i] = scale * x[i] + shift;
}
void lincomb(const real * const * xs, const real * coeffs, i64 terms, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n * terms > kGrainElems)
    for (i64 i = 0; i < n; ++i) {
        real acc = 0.0;
        for (i64 t = 0; t < terms; ++t) acc += coeffs[t] * xs[t][i];
        y[i] = acc;
    }
}
void tanh_(const real * x, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems / 4)
    for (i64 i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}
void sigmoid_(const real * x, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems / 4)
    for (i64 i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}
void exp_(const real * x, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems / 4)
    for (i64 i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}
void log_(const real * x, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems / 4)
    for (i64 i = 0; i < n; ++i) y[i] = std::log(x[i]);
}
void log_abs(const real * x, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems / 4)
    for (i64 i = 0; i < n; ++i) y[i] = std::log(std::fabs(x[i]));
}
void recip(const real * x, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 i = 0; i < n; ++i) y[i] = 1.0 / x[i];
}
void clamp(const real * x, real * y, i64 n, real lo, real hi) {
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 i = 0; i < n; ++i) y[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
}
void mul_channel(const real * x, const real * s, real * y, i64 B, i64 C, i64 L) {
#pragma omp parallel for collapse(2) schedule(static) if (B * C * L > kGrainElems)
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < C; ++c) {
            const real sc = s[c];
            const real * xr = x + (b * C + c) * L;
            real * yr = y + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) yr[l] = sc * xr[l];
        }
}
void bcast_channel(const real * s, real * y, i64 B, i64 C, i64 L) {
#pragma omp parallel for collapse(2) schedule(static) if (B * C * L > kGrainElems)
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < C; ++c) {
            real * yr = y + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) yr[l] = s[c];
        }
}
void bcast_batch(const real * v, real * y, i64 B, i64 C, i64 L) {
#pragma omp parallel for schedule(static) if (B * C * L > kGrainElems)
    for (i64 b = 0; b < B; ++b) {
        real * yr = y + b * C * L;
        for (i64 i = 0; i < C * L; ++i) yr[i] = v[b];
    }
}
void bcast_all(real v, real * y, i64 n) {
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 i = 0; i < n; ++i) y[i] = v;
}

real sum_all(const real * x, i64 n) {
    const i64 nch = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<real> partials(static_cast<size_t>(nch));
#pragma omp parallel for schedule(static) if (n > kGrainElems)
    for (i64 ch = 0; ch < nch; ++ch) {
        i64 lo = ch * kReduceChunk, hi = std::min(n, lo + kReduceChunk);
        real part = 0.0;
        for (i64 i = lo; i < hi; ++i) part += x[i];
        partials[static_cast<size_t>(ch)] = part;
    }
    real total = 0.0;
    for (real p : partials) total += p;  // fixed combine order
    return total;
}

void sum_bl(const real * x, real * out, i64 B, i64 C, i64 L) {
#pragma omp parallel for schedule(static) if (B * C * L > kGrainElems)
    for (i64 c = 0; c < C; ++c) {
        real acc = 0.0;
        for (i64 b = 0; b < B; ++b) {
            const real * xr = x + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) acc += xr[l];
        }
        out[c] = acc;
    }
}

void sum_cl(const real * x, real * out, i64 B, i64 C, i64 L) {
#pragma omp parallel for schedule(static) if (B * C * L > kGrainElems)
    for (i64 b = 0; b < B; ++b) {
        real acc = 0.0;
        const real * xr = x + b * C * L;
        for (i64 i = 0; i < C * L; ++i) acc += xr[i];
        out[b] = acc;
    }
}

void squeeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q) {
    const i64 Lq = L / q;
#pragma omp parallel for collapse(2) schedule(static) if (B * C * L > kGrainElems)
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < C; ++c)
            for (i64 l = 0; l < Lq; ++l)
                for (i64 r = 0; r < q; ++r)
                    y[(b * C * q + c * q + r) * Lq + l] = x[(b * C + c) * L + l * q + r];
}

void unsqueeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q) {
    const i64 Cq = C / q;
    const i64 Lq = L * q;
#pragma omp parallel for collapse(2) schedule(static) if (B * C * L > kGrainElems)
    for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < Cq; ++c)
            for (i64 l = 0; l < L; ++l)
                for (i64 r = 0; r < q; ++r)
                    y[(b * Cq + c) * Lq + l * q + r] = x[(b * C + c * q + r) * L + l];
}

}  // namespace par

// ---------------------------------------------------------------------------
// Dispatch.
// ---------------------------------------------------------------------------

#define WAVENODE_DISPATCH(call) \
    if (parallel_enabled()) return par::call; \
    return serial::call

void conv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 L,
            i64 Co, i64 K, i64 dil) {
    WAVENODE_DISPATCH(conv1d(x, w, bias, y, B, Ci, L, Co, K, dil));
}
void conv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 L, i64 Co, i64 K,
                  i64 dil) {
    WAVENODE_DISPATCH(conv1d_wgrad(x, gy, gw, B, Ci, L, Co, K, dil));
}
void flip_transpose_w(const real * w, real * out, i64 A, i64 Bdim, i64 K) {
    WAVENODE_DISPATCH(flip_transpose_w(w, out, A, Bdim, K));
}
void tconv1d(const real * x, const real * w, const real * bias, real * y, i64 B, i64 Ci, i64 T,
             i64 Co, i64 K, i64 stride, i64 pad) {
    WAVENODE_DISPATCH(tconv1d(x, w, bias, y, B, Ci, T, Co, K, stride, pad));
}
void tconv1d_dx(const real * gy, const real * w, real * gx, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                i64 stride, i64 pad) {
    WAVENODE_DISPATCH(tconv1d_dx(gy, w, gx, B, Ci, T, Co, K, stride, pad));
}
void tconv1d_wgrad(const real * x, const real * gy, real * gw, i64 B, i64 Ci, i64 T, i64 Co, i64 K,
                   i64 stride, i64 pad) {
    WAVENODE_DISPATCH(tconv1d_wgrad(x, gy, gw, B, Ci, T, Co, K, stride, pad));
}
void add(const real * a, const real * b, real * y, i64 n) { WAVENODE_DISPATCH(add(a, b, y, n)); }
void sub(const real * a, const real * b, real * y, i64 n) { WAVENODE_DISPATCH(sub(a, b, y, n)); }
void mul(const real * a, const real * b, real * y, i64 n) { WAVENODE_DISPATCH(mul(a, b, y, n)); }
void affine(const real * x, real * y, i64 n, real scale, real shift) {
    WAVENODE_DISPATCH(affine(x, y, n, scale, shift));
}
void lincomb(const real * const * xs, const real * coeffs, i64 terms, real * y, i64 n) {
    WAVENODE_DISPATCH(lincomb(xs, coeffs, terms, y, n));
}
void tanh_(const real * x, real * y, i64 n) { WAVENODE_DISPATCH(tanh_(x, y, n)); }
void sigmoid_(const real * x, real * y, i64 n) { WAVENODE_DISPATCH(sigmoid_(x, y, n)); }
void exp_(const real * x, real * y, i64 n) { WAVENODE_DISPATCH(exp_(x, y, n)); }
void log_(const real * x, real * y, i64 n) { WAVENODE_DISPATCH(log_(x, y, n)); }
void log_abs(const real * x, real * y, i64 n) { WAVENODE_DISPATCH(log_abs(x, y, n)); }
void recip(const real * x, real * y, i64 n) { WAVENODE_DISPATCH(recip(x, y, n)); }
void clamp(const real * x, real * y, i64 n, real lo, real hi) {
    WAVENODE_DISPATCH(clamp(x, y, n, lo, hi));
}
void mul_channel(const real * x, const real * s, real * y, i64 B, i64 C, i64 L) {
    WAVENODE_DISPATCH(mul_channel(x, s, y, B, C, L));
}
void bcast_channel(const real * s, real * y, i64 B, i64 C, i64 L) {
    WAVENODE_DISPATCH(bcast_channel(s, y, B, C, L));
}
void bcast_batch(const real * v, real * y, i64 B, i64 C, i64 L) {
    WAVENODE_DISPATCH(bcast_batch(v, y, B, C, L));
}
void bcast_all(real v, real * y, i64 n) { WAVENODE_DISPATCH(bcast_all(v, y, n)); }
real sum_all(const real * x, i64 n) { WAVENODE_DISPATCH(sum_all(x, n)); }
void sum_bl(const real * x, real * out, i64 B, i64 C, i64 L) {
    WAVENODE_DISPATCH(sum_bl(x, out, B, C, L));
}
void sum_cl(const real * x, real * out, i64 B, i64 C, i64 L) {
    WAVENODE_DISPATCH(sum_cl(x, out, B, C, L));
}
void squeeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q) {
    WAVENODE_DISPATCH(squeeze(x, y, B, C, L, q));
}
void unsqueeze(const real * x, real * y, i64 B, i64 C, i64 L, i64 q) {
    WAVENODE_DISPATCH(unsqueeze(x, y, B, C, L, q));
}

#undef WAVENODE_DISPATCH

void batch_stats(const Tensor & x, Tensor & mean, Tensor & stddev) {
    const i64 B = x.b(), C = x.c(), L = x.l();
    if (B * L == 0) throw DomainError("batch_stats: empty reduction over batch and length axes");
    mean = Tensor::zeros({C});
    stddev = Tensor::zeros({C});
    const real inv = 1.0 / static_cast<real>(B * L);
    for (i64 c = 0; c < C; ++c) {
        real m = 0.0;
        for (i64 b = 0; b < B; ++b) {
            const real * xr = x.ptr() + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) m += xr[l];
        }
        m *= inv;
        real v = 0.0;
        for (i64 b = 0; b < B; ++b) {
            const real * xr = x.ptr() + (b * C + c) * L;
            for (i64 l = 0; l < L; ++l) {
                real d = xr[l] - m;
                v += d * d;
            }
        }
        (*mean.data)[static_cast<size_t>(c)] = m;
        (*stddev.data)[static_cast<size_t>(c)] = std::sqrt(v * inv);
    }
}

}  // namespace wavenode::kernels
