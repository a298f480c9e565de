#include <algorithm>
#include <cmath>
#include <numeric>

#include "scatterkit/dtcwt.hpp"
#include "scatterkit/errors.hpp"

namespace scatterkit {
namespace {

// Near-symmetric 13/19-tap biorthogonal pair (Kingsbury's near_sym_b).
const std::vector<double> kNearSymBH0o = {
    -0.0017578125, 0.0,          0.022265625, -0.046875, -0.0482421875, 0.296875, 0.55546875,
    0.296875,      -0.0482421875, -0.046875,  0.022265625, 0.0,         -0.0017578125};

const std::vector<double> kNearSymBG0o = {
    7.062639508928571e-05,  0.0,                    -0.0013419015066964285, -0.0018833705357142855,
    0.007156808035714285,   0.023856026785714284,   -0.05564313616071428,   -0.05168805803571428,
    0.29975760323660716,    0.5594308035714286,     0.29975760323660716,    -0.05168805803571428,
    -0.05564313616071428,   0.023856026785714284,   0.007156808035714285,   -0.0018833705357142855,
    -0.0013419015066964285, 0.0,                    7.062639508928571e-05};

const std::vector<double> kNearSymBH1o = {
    -7.062639508928571e-05, 0.0,                    0.0013419015066964285,  -0.0018833705357142855,
    -0.007156808035714285,  0.023856026785714284,   0.05564313616071428,    -0.05168805803571428,
    -0.29975760323660716,   0.5594308035714286,     -0.29975760323660716,   -0.05168805803571428,
    0.05564313616071428,    0.023856026785714284,   -0.007156808035714285,  -0.0018833705357142855,
    0.0013419015066964285,  0.0,                    -7.062639508928571e-05};

const std::vector<double> kNearSymBG1o = {
    -0.0017578125, -0.0,          0.022265625, 0.046875, -0.0482421875, -0.296875, 0.55546875,
    -0.296875,     -0.0482421875, 0.046875,    0.022265625, -0.0,         -0.0017578125};

// 14-tap q-shift lowpass (Kingsbury's qshift_b) after a minimum-norm
// correction that makes it exactly orthonormal with H0(-1) = 0, so the
// derived highpass filters annihilate constants. No tap moves by more than
// 1.3e-7 from the published table.
const std::vector<double> kQshiftBH0a = {
    0.0032531314539378485, -0.0038832003841907654, 0.03466023000825229,  -0.03887268833066862,
    -0.11720401465701727,  0.27529548310269075,    0.7561455337234387,   0.568810532359082,
    0.01186597400431464,   -0.10671169218758102,   0.023825382688208774, 0.017025223370035186,
    -0.0054394560345875365, -0.004556876742820043};

std::vector<double> reversed(const std::vector<double>& h) { return {h.rbegin(), h.rend()}; }

QshiftFilters build_qshift(const std::vector<double>& h0a) {
  QshiftFilters q;
  q.h0a = h0a;
  q.h0b = reversed(h0a);
  q.g0a = q.h0b;
  q.g0b = q.h0a;
  q.h1a.resize(h0a.size());
  for (std::size_t n = 0; n < h0a.size(); ++n) q.h1a[n] = (n % 2 == 0 ? 1.0 : -1.0) * q.h0b[n];
  q.h1b = reversed(q.h1a);
  q.g1a = q.h1b;
  q.g1b = q.h1a;
  return q;
}

}  // namespace

WaveletFilterSet::WaveletFilterSet(BiorthogonalFilters level1, QshiftFilters qshift)
    : level1_(std::move(level1)), qshift_(std::move(qshift)) {
  auto odd = [](const std::vector<double>& h) { return h.size() % 2 == 1; };
  if (!odd(level1_.h0o) || !odd(level1_.h1o) || !odd(level1_.g0o) || !odd(level1_.g1o))
    throw ParameterError("level-1 filters must have odd lengths");
  const auto m = qshift_.h0a.size();
  for (const auto* h : {&qshift_.h0b, &qshift_.g0a, &qshift_.g0b, &qshift_.h1a, &qshift_.h1b,
                        &qshift_.g1a, &qshift_.g1b}) {
    if (h->size() != m) throw ParameterError("q-shift filters must share one length");
  }
  if (m == 0 || m % 2 != 0) throw ParameterError("q-shift filters must have even length");
}

const WaveletFilterSet& WaveletFilterSet::standard() {
  static const WaveletFilterSet set(
      BiorthogonalFilters{kNearSymBH0o, kNearSymBG0o, kNearSymBH1o, kNearSymBG1o},
      build_qshift(kQshiftBH0a));
  return set;
}

}  // namespace scatterkit
