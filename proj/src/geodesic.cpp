#include "tsd/geodesic.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "tsd/common.hpp"

namespace tsd {

namespace {

constexpr int kOrder = 6;  // series order in the third flattening
constexpr int kNC1 = kOrder, kNC2 = kOrder, kNA3 = kOrder, kNC3 = kOrder;

constexpr double kPi = std::numbers::pi;
constexpr double kDegree = kPi / 180.0;
constexpr int kMaxit1 = 20;
constexpr int kMaxit2 = kMaxit1 + DBL_MANT_DIG + 10;

const double kTiny = std::sqrt(std::numeric_limits<double>::min());
constexpr double kTol0 = std::numeric_limits<double>::epsilon();
constexpr double kTol1 = 200 * kTol0;
const double kTol2 = std::sqrt(kTol0);
constexpr double kTolb = kTol0;
const double kXthresh = 1000 * kTol2;

inline double sq(double x) { return x * x; }

void norm2(double& x, double& y) {
  const double r = std::hypot(x, y);
  x /= r;
  y /= r;
}

double polyval(int n, const double* p, double x) {
  double y = n < 0 ? 0 : *p++;
  while (--n >= 0) y = y * x + *p++;
  return y;
}

// Error-free sum: returns round(u + v), stores the rounding error in t.
double sum_err(double u, double v, double& t) {
  const double s = u + v;
  double up = s - v;
  double vpp = s - up;
  up -= u;
  vpp -= v;
  t = s != 0 ? 0.0 - (up + vpp) : s;
  return s;
}

// Rounds tiny angles so that values below ~1/2^57 degrees underflow to zero.
double ang_round(double x) {
  constexpr double z = 1.0 / 16;
  double y = std::fabs(x);
  if (y < z) {
    volatile double w = z - y;
    y = z - w;
  }
  return std::copysign(y, x);
}

double ang_diff(double x, double y, double& e) {
  double t;
  double d = sum_err(std::remainder(-x, 360.0), std::remainder(y, 360.0), t);
  d = sum_err(std::remainder(d, 360.0), t, e);
  if (d == 0 || std::fabs(d) == 180) d = std::copysign(d, e == 0 ? y - x : -e);
  return d;
}

void sincosd(double x, double& sinx, double& cosx) {
  int q = 0;
  double r = std::remquo(x, 90.0, &q);
  r *= kDegree;
  const double s = std::sin(r), c = std::cos(r);
  switch (static_cast<unsigned>(q) & 3U) {
    case 0U: sinx = s; cosx = c; break;
    case 1U: sinx = c; cosx = -s; break;
    case 2U: sinx = -s; cosx = -c; break;
    default: sinx = -c; cosx = s; break;
  }
  cosx += 0.0;
  if (sinx == 0) sinx = std::copysign(sinx, x);
}

// sin/cos of (x + t) degrees for x in [-180, 180] and small correction t.
void sincosde(double x, double t, double& sinx, double& cosx) {
  int q = 0;
  double r = ang_round(std::remquo(x, 90.0, &q) + t);
  r *= kDegree;
  const double s = std::sin(r), c = std::cos(r);
  switch (static_cast<unsigned>(q) & 3U) {
    case 0U: sinx = s; cosx = c; break;
    case 1U: sinx = c; cosx = -s; break;
    case 2U: sinx = -s; cosx = -c; break;
    default: sinx = -c; cosx = s; break;
  }
  cosx += 0.0;
  if (sinx == 0) sinx = std::copysign(sinx, x);
}

double atan2d(double y, double x) {
  int q = 0;
  if (std::fabs(y) > std::fabs(x)) {
    std::swap(x, y);
    q = 2;
  }
  if (std::signbit(x)) {
    x = -x;
    ++q;
  }
  double ang = std::atan2(y, x) / kDegree;
  switch (q) {
    case 1: ang = std::copysign(180.0, y) - ang; break;
    case 2: ang = 90 - ang; break;
    case 3: ang = -90 + ang; break;
    default: break;
  }
  return ang;
}

// Clenshaw summation of sum(c[i] * sin(2*i*x), i = 1..n).
double sin_series(double sinx, double cosx, const double c[], int n) {
  const double* p = c + n + 1;
  const double ar = 2 * (cosx - sinx) * (cosx + sinx);
  double y0 = (n & 1) ? *--p : 0, y1 = 0;
  n /= 2;
  while (n--) {
    y1 = ar * y0 - y1 + *--p;
    y0 = ar * y1 - y0 + *--p;
  }
  return 2 * sinx * cosx * y0;
}

// Positive root k of k^4 + 2k^3 - (x^2 + y^2 - 1)k^2 - 2y^2 k - y^2 = 0.
double astroid(double x, double y) {
  double k;
  const double p = sq(x), q = sq(y), r = (p + q - 1) / 6;
  if (!(q == 0 && r <= 0)) {
    const double S = p * q / 4, r2 = sq(r), r3 = r * r2;
    const double disc = S * (S + 2 * r3);
    double u = r;
    if (disc >= 0) {
      double T3 = S + r3;
      T3 += T3 < 0 ? -std::sqrt(disc) : std::sqrt(disc);
      const double T = std::cbrt(T3);
      u += T + (T != 0 ? r2 / T : 0);
    } else {
      const double ang = std::atan2(std::sqrt(-disc), -(S + r3));
      u += 2 * r * std::cos(ang / 3);
    }
    const double v = std::sqrt(sq(u) + q);
    const double uv = u < 0 ? q / (v - u) : u + v;
    const double w = (uv - q) / (2 * v);
    k = uv / (std::sqrt(uv + sq(w)) + w);
  } else {
    k = 0;
  }
  return k;
}

double a1m1f(double eps) {
  static const double coeff[] = {1, 4, 64, 0, 256};
  const int m = kNC1 / 2;
  const double t = polyval(m, coeff, sq(eps)) / coeff[m + 1];
  return (t + eps) / (1 - eps);
}

void c1f(double eps, double c[]) {
  static const double coeff[] = {
      -1, 6, -16, 32, -9, 64, -128, 2048, 9, -16, 768, 3, -5, 512, -7, 1280, -7, 2048,
  };
  const double eps2 = sq(eps);
  double d = eps;
  int o = 0;
  for (int l = 1; l <= kNC1; ++l) {
    const int m = (kNC1 - l) / 2;
    c[l] = d * polyval(m, coeff + o, eps2) / coeff[o + m + 1];
    o += m + 2;
    d *= eps;
  }
}

double a2m1f(double eps) {
  static const double coeff[] = {-11, -28, -192, 0, 256};
  const int m = kNC2 / 2;
  const double t = polyval(m, coeff, sq(eps)) / coeff[m + 1];
  return (t - eps) / (1 + eps);
}

void c2f(double eps, double c[]) {
  static const double coeff[] = {
      1, 2, 16, 32, 35, 64, 384, 2048, 15, 80, 768, 7, 35, 512, 63, 1280, 77, 2048,
  };
  const double eps2 = sq(eps);
  double d = eps;
  int o = 0;
  for (int l = 1; l <= kNC2; ++l) {
    const int m = (kNC2 - l) / 2;
    c[l] = d * polyval(m, coeff + o, eps2) / coeff[o + m + 1];
    o += m + 2;
    d *= eps;
  }
}

}  // namespace

GeoPoint GeoPoint::make(double latitude_deg, double longitude_deg) {
  if (std::isnan(latitude_deg) || std::isnan(longitude_deg))
    throw ValidationError("geographic coordinate is NaN");
  if (std::fabs(latitude_deg) > 90.0) throw ValidationError("latitude outside [-90, 90]");
  if (!std::isfinite(longitude_deg)) throw ValidationError("longitude is not finite");
  double lon = std::remainder(longitude_deg, 360.0);
  if (lon == -180.0) lon = 180.0;
  return GeoPoint{latitude_deg, lon};
}

struct Geodesic::StartResult {
  double sig12, salp1, calp1, salp2, calp2, dnm;
};

struct Geodesic::Lambda12Result {
  double lam12, salp2, calp2, sig12, ssig1, csig1, ssig2, csig2, eps, domg12, dlam12;
};

Geodesic::Geodesic(const Ellipsoid& ellipsoid) : ellipsoid_(ellipsoid) {
  a_ = ellipsoid.semi_major_axis_m;
  f_ = ellipsoid.flattening;
  if (!(std::isfinite(a_) && a_ > 0)) throw ValidationError("semi-major axis must be positive");
  if (!(f_ >= 0 && f_ < 1)) throw ValidationError("flattening must lie in [0, 1)");
  f1_ = 1 - f_;
  e2_ = f_ * (2 - f_);
  ep2_ = e2_ / sq(f1_);
  n_ = f_ / (2 - f_);
  b_ = a_ * f1_;
  etol2_ = 0.1 * kTol2 / std::sqrt(std::max(0.001, std::fabs(f_)) * std::min(1.0, 1 - f_ / 2) / 2);

  static const double a3_coeff[] = {
      -3, 128, -2, -3, 64, -1, -3, -1, 16, 3, -1, -2, 8, 1, -1, 2, 1, 1,
  };
  int o = 0, k = 0;
  for (int j = kNA3 - 1; j >= 0; --j) {
    const int m = std::min(kNA3 - j - 1, j);
    a3x_[k++] = polyval(m, a3_coeff + o, n_) / a3_coeff[o + m + 1];
    o += m + 2;
  }

  static const double c3_coeff[] = {
      3, 128, 2, 5, 128, -1, 3, 3, 64, -1, 0, 1, 8, -1, 1, 4,   // C3[1]
      5, 256, 1, 3, 128, -3, -2, 3, 64, 1, -3, 2, 32,           // C3[2]
      7, 512, -10, 9, 384, 5, -9, 5, 192,                       // C3[3]
      7, 512, -14, 7, 512,                                      // C3[4]
      21, 2560,                                                 // C3[5]
  };
  o = 0;
  k = 0;
  for (int l = 1; l < kNC3; ++l) {
    for (int j = kNC3 - 1; j >= l; --j) {
      const int m = std::min(kNC3 - j - 1, j);
      c3x_[k++] = polyval(m, c3_coeff + o, n_) / c3_coeff[o + m + 1];
      o += m + 2;
    }
  }
}

double Geodesic::a3f(double eps) const { return polyval(kNA3 - 1, a3x_, eps); }

void Geodesic::c3f(double eps, double c[]) const {
  double mult = 1;
  int o = 0;
  for (int l = 1; l < kNC3; ++l) {
    const int m = kNC3 - l - 1;
    mult *= eps;
    c[l] = mult * polyval(m, c3x_ + o, eps);
    o += m + 1;
  }
}

void Geodesic::lengths(double eps, double sig12, double ssig1, double csig1, double dn1,
                       double ssig2, double csig2, double dn2, bool want_reduced, double& s12b,
                       double& m12b, double& m0, double c1a[], double c2a[]) const {
  double a1 = a1m1f(eps);
  c1f(eps, c1a);
  double a2 = 0, m0x = 0;
  if (want_reduced) {
    a2 = a2m1f(eps);
    c2f(eps, c2a);
    m0x = a1 - a2;
    a2 = 1 + a2;
  }
  a1 = 1 + a1;
  const double b1 = sin_series(ssig2, csig2, c1a, kNC1) - sin_series(ssig1, csig1, c1a, kNC1);
  s12b = a1 * (sig12 + b1);
  if (want_reduced) {
    const double b2 = sin_series(ssig2, csig2, c2a, kNC2) - sin_series(ssig1, csig1, c2a, kNC2);
    const double j12 = m0x * sig12 + (a1 * b1 - a2 * b2);
    m0 = m0x;
    m12b = dn2 * (csig1 * ssig2) - dn1 * (ssig1 * csig2) - csig1 * csig2 * j12;
  }
}

Geodesic::StartResult Geodesic::inverse_start(double sbet1, double cbet1, double sbet2,
                                              double cbet2, double lam12, double slam12,
                                              double clam12) const {
  StartResult r{-1, 0, 0, std::nan(""), std::nan(""), std::nan("")};
  const double sbet12 = sbet2 * cbet1 - cbet2 * sbet1;
  const double cbet12 = cbet2 * cbet1 + sbet2 * sbet1;
  volatile double sbet12a_v = sbet2 * cbet1;
  sbet12a_v = sbet12a_v + cbet2 * sbet1;
  const double sbet12a = sbet12a_v;

  const bool shortline = cbet12 >= 0 && sbet12 < 0.5 && cbet2 * lam12 < 0.5;
  double somg12, comg12;
  if (shortline) {
    double sbetm2 = sq(sbet1 + sbet2);
    sbetm2 /= sbetm2 + sq(cbet1 + cbet2);
    r.dnm = std::sqrt(1 + ep2_ * sbetm2);
    const double omg12 = lam12 / (f1_ * r.dnm);
    somg12 = std::sin(omg12);
    comg12 = std::cos(omg12);
  } else {
    somg12 = slam12;
    comg12 = clam12;
  }

  r.salp1 = cbet2 * somg12;
  r.calp1 = comg12 >= 0 ? sbet12 + cbet2 * sbet1 * sq(somg12) / (1 + comg12)
                        : sbet12a - cbet2 * sbet1 * sq(somg12) / (1 - comg12);

  const double ssig12 = std::hypot(r.salp1, r.calp1);
  const double csig12 = sbet1 * sbet2 + cbet1 * cbet2 * comg12;

  if (shortline && ssig12 < etol2_) {
    r.salp2 = cbet1 * somg12;
    r.calp2 = sbet12 - cbet1 * sbet2 * (comg12 >= 0 ? sq(somg12) / (1 + comg12) : 1 - comg12);
    norm2(r.salp2, r.calp2);
    r.sig12 = std::atan2(ssig12, csig12);
  } else if (std::fabs(n_) >= 0.1 || csig12 >= 0 ||
             ssig12 >= 6 * std::fabs(n_) * kPi * sq(cbet1)) {
    // zeroth-order spherical estimate is adequate
  } else {
    // Near-antipodal: scale so the antipode sits at the origin and solve the
    // astroid problem for a starting azimuth. f < 0 is excluded by the
    // Ellipsoid invariants, so only the oblate branch is needed.
    const double lam12x = std::atan2(-slam12, -clam12);
    const double k2 = sq(sbet1) * ep2_;
    const double eps = k2 / (2 * (1 + std::sqrt(1 + k2)) + k2);
    const double lamscale = f_ * cbet1 * a3f(eps) * kPi;
    const double betscale = lamscale * cbet1;
    const double x = lam12x / lamscale;
    const double y = sbet12a / betscale;

    if (y > -kTol1 && x > -1 - kXthresh) {
      r.salp1 = std::min(1.0, -x);
      r.calp1 = -std::sqrt(1 - sq(r.salp1));
    } else {
      const double k = astroid(x, y);
      const double omg12a = lamscale * (-x * k / (1 + k));
      somg12 = std::sin(omg12a);
      comg12 = -std::cos(omg12a);
      r.salp1 = cbet2 * somg12;
      r.calp1 = sbet12a - cbet2 * sbet1 * sq(somg12) / (1 - comg12);
    }
  }
  if (!(r.salp1 <= 0)) {
    norm2(r.salp1, r.calp1);
  } else {
    r.salp1 = 1;
    r.calp1 = 0;
  }
  return r;
}

Geodesic::Lambda12Result Geodesic::lambda12(double sbet1, double cbet1, double dn1, double sbet2,
                                            double cbet2, double dn2, double salp1, double calp1,
                                            double slam120, double clam120, bool diffp,
                                            double c1a[], double c2a[], double c3a[]) const {
  Lambda12Result r{};
  if (sbet1 == 0 && calp1 == 0) calp1 = -kTiny;  // break equatorial degeneracy

  const double salp0 = salp1 * cbet1;
  const double calp0 = std::hypot(calp1, salp1 * sbet1);

  double ssig1 = sbet1;
  const double somg1 = salp0 * sbet1;
  double csig1 = calp1 * cbet1;
  const double comg1 = csig1;
  norm2(ssig1, csig1);

  r.salp2 = cbet2 != cbet1 ? salp0 / cbet2 : salp1;
  r.calp2 = cbet2 != cbet1 || std::fabs(sbet2) != -sbet1
                ? std::sqrt(sq(calp1 * cbet1) + (cbet1 < -sbet1 ? (cbet2 - cbet1) * (cbet1 + cbet2)
                                                                : (sbet1 - sbet2) * (sbet1 + sbet2))) /
                      cbet2
                : std::fabs(calp1);

  double ssig2 = sbet2;
  const double somg2 = salp0 * sbet2;
  double csig2 = r.calp2 * cbet2;
  const double comg2 = csig2;
  norm2(ssig2, csig2);

  r.sig12 = std::atan2(std::max(0.0, csig1 * ssig2 - ssig1 * csig2) + 0.0,
                       csig1 * csig2 + ssig1 * ssig2);
  const double somg12 = std::max(0.0, comg1 * somg2 - somg1 * comg2) + 0.0;
  const double comg12 = comg1 * comg2 + somg1 * somg2;
  const double eta =
      std::atan2(somg12 * clam120 - comg12 * slam120, comg12 * clam120 + somg12 * slam120);

  const double k2 = sq(calp0) * ep2_;
  r.eps = k2 / (2 * (1 + std::sqrt(1 + k2)) + k2);
  c3f(r.eps, c3a);
  const double b312 = sin_series(ssig2, csig2, c3a, kNC3 - 1) - sin_series(ssig1, csig1, c3a, kNC3 - 1);
  r.domg12 = -f_ * a3f(r.eps) * salp0 * (r.sig12 + b312);
  r.lam12 = eta + r.domg12;

  if (diffp) {
    if (r.calp2 == 0) {
      r.dlam12 = -2 * f1_ * dn1 / sbet1;
    } else {
      double s12b, m12b, m0;
      lengths(r.eps, r.sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, true, s12b, m12b, m0, c1a, c2a);
      r.dlam12 = m12b * f1_ / (r.calp2 * cbet2);
    }
  } else {
    r.dlam12 = std::nan("");
  }
  r.ssig1 = ssig1;
  r.csig1 = csig1;
  r.ssig2 = ssig2;
  r.csig2 = csig2;
  return r;
}

GeodesicSolution Geodesic::inverse(const GeoPoint& p1, const GeoPoint& p2) const {
  return inverse(p1.latitude_deg, p1.longitude_deg, p2.latitude_deg, p2.longitude_deg);
}

GeodesicSolution Geodesic::inverse(double lat1, double lon1, double lat2, double lon2) const {
  if (std::isnan(lat1) || std::isnan(lon1) || std::isnan(lat2) || std::isnan(lon2))
    throw ValidationError("geodesic endpoint is NaN");
  if (std::fabs(lat1) > 90 || std::fabs(lat2) > 90)
    throw ValidationError("latitude outside [-90, 90]");
  if (!std::isfinite(lon1) || !std::isfinite(lon2))
    throw ValidationError("longitude is not finite");

  GeodesicSolution out;
  if (lat1 == lat2 && std::remainder(lon1 - lon2, 360.0) == 0.0) return out;

  double lon12s;
  double lon12 = ang_diff(lon1, lon2, lon12s);
  double lonsign = std::signbit(lon12) ? -1 : 1;
  lon12 *= lonsign;
  lon12s *= lonsign;
  const double lam12 = lon12 * kDegree;
  double slam12, clam12;
  sincosde(lon12, lon12s, slam12, clam12);
  lon12s = (180 - lon12) - lon12s;

  lat1 = ang_round(lat1);
  lat2 = ang_round(lat2);
  const double swapp = std::fabs(lat1) < std::fabs(lat2) ? -1 : 1;
  if (swapp < 0) {
    lonsign *= -1;
    std::swap(lat1, lat2);
  }
  const double latsign = std::signbit(lat1) ? 1 : -1;
  lat1 *= latsign;
  lat2 *= latsign;
  // Now 0 <= lon12 <= 180, -90 <= lat1 <= 0, lat1 <= lat2 <= -lat1.

  double sbet1, cbet1, sbet2, cbet2;
  sincosd(lat1, sbet1, cbet1);
  sbet1 *= f1_;
  norm2(sbet1, cbet1);
  cbet1 = std::max(kTiny, cbet1);

  sincosd(lat2, sbet2, cbet2);
  sbet2 *= f1_;
  norm2(sbet2, cbet2);
  cbet2 = std::max(kTiny, cbet2);

  if (cbet1 < -sbet1) {
    if (cbet2 == cbet1) sbet2 = std::copysign(sbet1, sbet2);
  } else {
    if (std::fabs(sbet2) == -sbet1) cbet2 = cbet1;
  }

  const double dn1 = std::sqrt(1 + ep2_ * sq(sbet1));
  const double dn2 = std::sqrt(1 + ep2_ * sq(sbet2));

  double c1a[kNC1 + 1], c2a[kNC2 + 1], c3a[kNC3];
  double a12 = 0, sig12 = 0, calp1 = 0, salp1 = 0, calp2 = 0, salp2 = 0;
  double s12x = 0, m12x = 0;

  bool meridian = lat1 == -90 || slam12 == 0;
  if (meridian) {
    calp1 = clam12;
    salp1 = slam12;
    calp2 = 1;
    salp2 = 0;
    const double ssig1 = sbet1, csig1 = calp1 * cbet1;
    const double ssig2 = sbet2, csig2 = calp2 * cbet2;
    sig12 = std::atan2(std::max(0.0, csig1 * ssig2 - ssig1 * csig2) + 0.0,
                       csig1 * csig2 + ssig1 * ssig2);
    double m0;
    lengths(n_, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2, true, s12x, m12x, m0, c1a, c2a);
    if (sig12 < kTol2 || m12x >= 0) {
      if (sig12 < 3 * kTiny || (sig12 < kTol0 && (s12x < 0 || m12x < 0)))
        sig12 = m12x = s12x = 0;
      m12x *= b_;
      s12x *= b_;
      a12 = sig12 / kDegree;
    } else {
      meridian = false;  // prolate and too close to antipodal
    }
  }

  if (!meridian && sbet1 == 0 && (f_ <= 0 || lon12s >= f_ * 180)) {
    // equatorial geodesic
    calp1 = calp2 = 0;
    salp1 = salp2 = 1;
    s12x = a_ * lam12;
    sig12 = lam12 / f1_;
    m12x = b_ * std::sin(sig12);
    a12 = lon12 / f1_;
  } else if (!meridian) {
    const StartResult start =
        inverse_start(sbet1, cbet1, sbet2, cbet2, lam12, slam12, clam12);
    sig12 = start.sig12;
    salp1 = start.salp1;
    calp1 = start.calp1;
    if (sig12 >= 0) {
      salp2 = start.salp2;
      calp2 = start.calp2;
      s12x = sig12 * b_ * start.dnm;
      m12x = sq(start.dnm) * b_ * std::sin(sig12 / start.dnm);
      a12 = sig12 / kDegree;
    } else {
      // Newton on lambda12(alp1) - lam12 = 0 with a maintained bracket
      // [alp1a, alp1b]; fall back to bisection whenever a Newton step leaves it.
      int numit = 0;
      bool tripn = false, tripb = false;
      double salp1a = kTiny, calp1a = 1, salp1b = kTiny, calp1b = -1;
      Lambda12Result lr{};
      for (;;) {
        lr = lambda12(sbet1, cbet1, dn1, sbet2, cbet2, dn2, salp1, calp1, slam12, clam12,
                      numit < kMaxit1, c1a, c2a, c3a);
        const double v = lr.lam12;
        if (tripb || !(std::fabs(v) >= (tripn ? 8 : 1) * kTol0) || numit == kMaxit2) break;
        if (v > 0 && (numit > kMaxit1 || calp1 / salp1 > calp1b / salp1b)) {
          salp1b = salp1;
          calp1b = calp1;
        } else if (v < 0 && (numit > kMaxit1 || calp1 / salp1 < calp1a / salp1a)) {
          salp1a = salp1;
          calp1a = calp1;
        }
        ++numit;
        if (numit < kMaxit1 && lr.dlam12 > 0) {
          const double dalp1 = -v / lr.dlam12;
          if (std::fabs(dalp1) < kPi) {
            const double sdalp1 = std::sin(dalp1), cdalp1 = std::cos(dalp1);
            const double nsalp1 = salp1 * cdalp1 + calp1 * sdalp1;
            if (nsalp1 > 0) {
              calp1 = calp1 * cdalp1 - salp1 * sdalp1;
              salp1 = nsalp1;
              norm2(salp1, calp1);
              tripn = std::fabs(v) <= 16 * kTol0;
              continue;
            }
          }
        }
        salp1 = (salp1a + salp1b) / 2;
        calp1 = (calp1a + calp1b) / 2;
        norm2(salp1, calp1);
        tripn = false;
        tripb = (std::fabs(salp1a - salp1) + (calp1a - calp1) < kTolb ||
                 std::fabs(salp1 - salp1b) + (calp1 - calp1b) < kTolb);
      }
      salp2 = lr.salp2;
      calp2 = lr.calp2;
      sig12 = lr.sig12;
      double m0;
      lengths(lr.eps, sig12, lr.ssig1, lr.csig1, dn1, lr.ssig2, lr.csig2, dn2, false, s12x, m12x,
              m0, c1a, c2a);
      s12x *= b_;
      a12 = sig12 / kDegree;
    }
  }

  if (swapp < 0) {
    std::swap(salp1, salp2);
    std::swap(calp1, calp2);
  }
  salp1 *= swapp * lonsign;
  calp1 *= swapp * latsign;
  salp2 *= swapp * lonsign;
  calp2 *= swapp * latsign;

  out.distance_m = 0.0 + s12x;
  out.azimuth1_deg = atan2d(salp1, calp1);
  out.azimuth2_deg = atan2d(salp2, calp2);
  out.arc_deg = a12;
  return out;
}

GeodesicSolution geodesic_inverse(const GeoPoint& p1, const GeoPoint& p2, const Ellipsoid& ellipsoid) {
  return Geodesic(ellipsoid).inverse(p1, p2);
}

double probe_link_distance(const Geodesic& geodesic, const GeoPoint& link_start,
                           const GeoPoint& probe_fix, DistanceMode mode, double prior_cumulative_m,
                           const GeoPoint* previous_fix) {
  if (mode == DistanceMode::Direct) return geodesic.inverse(link_start, probe_fix).distance_m;
  const GeoPoint& from = previous_fix ? *previous_fix : link_start;
  return prior_cumulative_m + geodesic.inverse(from, probe_fix).distance_m;
}

std::vector<double> probe_distances(const Geodesic& geodesic, const GeoPoint& link_start,
                                    std::span<const GeoPoint> fixes, DistanceMode mode) {
  std::vector<double> out;
  out.reserve(fixes.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < fixes.size(); ++i) {
    const GeoPoint* prev = i > 0 ? &fixes[i - 1] : nullptr;
    cumulative = probe_link_distance(geodesic, link_start, fixes[i], mode, cumulative, prev);
    out.push_back(cumulative);
  }
  return out;
}

}  // namespace tsd
