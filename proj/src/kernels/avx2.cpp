// AVX2 + FMA variants of the kernels in scalar.cpp. This translation unit is
// compiled with -mavx2 -mfma and only reached after a runtime CPU check.
//
// sin/exp use the Cephes double-precision reductions and polynomials; they
// agree with libm to a few ulp over the argument ranges the simulator uses
// (|x| up to ~1e5 rad for sin, x in [-708, 0] for exp).

#include "qict/kernels/kernels.hpp"

#if defined(QICT_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace qict::kernels {
namespace {

inline __m256d poly2(__m256d x, double c0, double c1, double c2) {
  return _mm256_fmadd_pd(_mm256_fmadd_pd(_mm256_set1_pd(c0), x, _mm256_set1_pd(c1)), x,
                         _mm256_set1_pd(c2));
}

inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  x = _mm256_min_pd(x, _mm256_set1_pd(709.0));

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  const __m256d px = _mm256_mul_pd(
      r, poly2(rr, 1.26177193074810590878E-4, 3.02994407707441961300E-2, 9.99999999999999999910E-1));
  __m256d qx = poly2(rr, 3.00198505138664455042E-6, 2.52448340349684104192E-3,
                     2.27265548208155028766E-1);
  qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // 2^n assembled directly in the exponent field.
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, e);
}

inline __m256d sin_pd(__m256d x) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d sign = _mm256_and_pd(x, sign_mask);
  const __m256d ax = _mm256_andnot_pd(sign_mask, x);

  // Octant index, rounded up to even.
  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(1.27323954473516268615)));
  const __m256d odd = _mm256_sub_pd(y, _mm256_mul_pd(_mm256_set1_pd(2.0),
                                                     _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.5)))));
  y = _mm256_add_pd(y, odd);
  __m256d j = _mm256_sub_pd(y, _mm256_mul_pd(_mm256_set1_pd(8.0),
                                             _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125)))));

  const __m256d upper = _mm256_cmp_pd(j, _mm256_set1_pd(4.0), _CMP_GE_OQ);
  j = _mm256_sub_pd(j, _mm256_and_pd(upper, _mm256_set1_pd(4.0)));
  const __m256d use_cos = _mm256_cmp_pd(j, _mm256_set1_pd(2.0), _CMP_EQ_OQ);

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156E-1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668E-8), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645E-15), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-2.50507477628578072866E-8));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(2.75573136213857245213E-6));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.98412698295895385996E-4));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(8.33333333332211858878E-3));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.66666666666666307295E-1));
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), ps, z);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.08757008419747316778E-9));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-2.75573141792967388112E-7));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.48015872888517045348E-5));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-1.38888888888730564116E-3));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(4.16666666666665929218E-2));
  __m256d c = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0));
  c = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), pc, c);

  __m256d result = _mm256_blendv_pd(s, c, use_cos);
  result = _mm256_xor_pd(result, _mm256_and_pd(upper, sign_mask));
  return _mm256_xor_pd(result, sign);
}

inline __m256d lane_index(std::size_t k) {
  const double base = static_cast<double>(k);
  return _mm256_add_pd(_mm256_set1_pd(base), _mm256_set_pd(3.0, 2.0, 1.0, 0.0));
}

void add_tone(std::span<double> out, double x0, double dx, const Tone& tone) {
  const double origin = x0 - tone.center;
  const __m256d vorigin = _mm256_set1_pd(origin);
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vneg_alpha = _mm256_set1_pd(-tone.alpha);
  const __m256d vomega = _mm256_set1_pd(tone.omega);
  const __m256d vphase = _mm256_set1_pd(tone.phase);
  const __m256d vamp = _mm256_set1_pd(tone.amplitude);

  std::size_t k = 0;
  const std::size_t n = out.size();
  for (; k + 4 <= n; k += 4) {
    const __m256d u = _mm256_fmadd_pd(lane_index(k), vdx, vorigin);
    const __m256d envelope = exp_pd(_mm256_mul_pd(_mm256_mul_pd(vneg_alpha, u), u));
    const __m256d carrier = sin_pd(_mm256_fmadd_pd(vomega, u, vphase));
    const __m256d term = _mm256_mul_pd(_mm256_mul_pd(vamp, envelope), carrier);
    _mm256_storeu_pd(out.data() + k, _mm256_add_pd(_mm256_loadu_pd(out.data() + k), term));
  }
  for (; k < n; ++k) {
    const double u = std::fma(static_cast<double>(k), dx, origin);
    out[k] += tone.amplitude * std::exp(-tone.alpha * u * u) * std::sin(std::fma(tone.omega, u, tone.phase));
  }
}

void fill_gaussian(std::span<double> out, double x0, double dx, double center, double alpha) {
  const double origin = x0 - center;
  const __m256d vorigin = _mm256_set1_pd(origin);
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vneg_alpha = _mm256_set1_pd(-alpha);
  std::size_t k = 0;
  const std::size_t n = out.size();
  for (; k + 4 <= n; k += 4) {
    const __m256d u = _mm256_fmadd_pd(lane_index(k), vdx, vorigin);
    _mm256_storeu_pd(out.data() + k, exp_pd(_mm256_mul_pd(_mm256_mul_pd(vneg_alpha, u), u)));
  }
  for (; k < n; ++k) {
    const double u = std::fma(static_cast<double>(k), dx, origin);
    out[k] = std::exp(-alpha * u * u);
  }
}

void magnitude(std::span<const std::complex<double>> in, std::span<double> out) {
  const auto* raw = reinterpret_cast<const double*>(in.data());
  std::size_t k = 0;
  const std::size_t n = in.size();
  for (; k + 4 <= n; k += 4) {
    const __m256d a = _mm256_loadu_pd(raw + 2 * k);
    const __m256d b = _mm256_loadu_pd(raw + 2 * k + 4);
    // hadd interleaves the two registers: [m0, m2, m1, m3].
    const __m256d sums = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m256d ordered = _mm256_permute4x64_pd(sums, _MM_SHUFFLE(3, 1, 2, 0));
    _mm256_storeu_pd(out.data() + k, _mm256_sqrt_pd(ordered));
  }
  for (; k < n; ++k) {
    const double re = in[k].real();
    const double im = in[k].imag();
    out[k] = std::sqrt(re * re + im * im);
  }
}

} // namespace

const Table* avx2_table() {
  static constexpr Table table{Isa::avx2, &add_tone, &fill_gaussian, &magnitude};
  return &table;
}

} // namespace qict::kernels

#else

namespace qict::kernels {
const Table* avx2_table() { return nullptr; }
} // namespace qict::kernels

#endif
