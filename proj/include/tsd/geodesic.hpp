#pragma once

#include <span>
#include <vector>

namespace tsd {

/// WGS84 latitude/longitude in degrees. Construction via make() normalizes
/// longitude into (-180, 180] and rejects out-of-range latitude.
struct GeoPoint {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;

  static GeoPoint make(double latitude_deg, double longitude_deg);
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Ellipsoid {
  double semi_major_axis_m = 6378137.0;
  double flattening = 1.0 / 298.257223563;

  static Ellipsoid wgs84() { return {}; }
  static Ellipsoid sphere(double radius_m) { return {radius_m, 0.0}; }
};

struct GeodesicSolution {
  double distance_m = 0.0;
  double azimuth1_deg = 0.0;  // clockwise from north at the first point
  double azimuth2_deg = 0.0;  // forward azimuth at the second point
  double arc_deg = 0.0;       // spherical arc length on the auxiliary sphere
};

/// Inverse geodesic problem on an oblate ellipsoid of revolution (or a sphere),
/// following Karney (2013): auxiliary-sphere reduction, sixth-order series in
/// the third flattening, and a bracketed Newton solve for the azimuth at the
/// first point. Converges for all inputs including nearly antipodal pairs.
class Geodesic {
 public:
  explicit Geodesic(const Ellipsoid& ellipsoid = Ellipsoid::wgs84());

  GeodesicSolution inverse(const GeoPoint& p1, const GeoPoint& p2) const;
  /// Raw-degree overload; throws ValidationError on NaN or |lat| > 90.
  GeodesicSolution inverse(double lat1, double lon1, double lat2, double lon2) const;

  const Ellipsoid& ellipsoid() const noexcept { return ellipsoid_; }

 private:
  struct Lambda12Result;
  struct StartResult;

  double a3f(double eps) const;
  void c3f(double eps, double c[]) const;
  void lengths(double eps, double sig12, double ssig1, double csig1, double dn1, double ssig2,
               double csig2, double dn2, bool want_reduced, double& s12b, double& m12b,
               double& m0, double c1a[], double c2a[]) const;
  StartResult inverse_start(double sbet1, double cbet1, double sbet2, double cbet2, double lam12,
                            double slam12, double clam12) const;
  Lambda12Result lambda12(double sbet1, double cbet1, double dn1, double sbet2, double cbet2,
                          double dn2, double salp1, double calp1, double slam120, double clam120,
                          bool diffp, double c1a[], double c2a[], double c3a[]) const;

  Ellipsoid ellipsoid_;
  double a_, f_, f1_, e2_, ep2_, n_, b_, etol2_;
  double a3x_[6];
  double c3x_[15];
};

/// Convenience wrapper over a WGS84 Geodesic.
GeodesicSolution geodesic_inverse(const GeoPoint& p1, const GeoPoint& p2,
                                  const Ellipsoid& ellipsoid = Ellipsoid::wgs84());

enum class DistanceMode { Direct, Cumulative };

/// Probe distance along the link. Direct: geodesic from the link start.
/// Cumulative: `prior_cumulative_m` plus the geodesic from `previous_fix`.
double probe_link_distance(const Geodesic& geodesic, const GeoPoint& link_start,
                           const GeoPoint& probe_fix, DistanceMode mode,
                           double prior_cumulative_m = 0.0, const GeoPoint* previous_fix = nullptr);

/// Per-fix probe distances for a whole track of fixes.
std::vector<double> probe_distances(const Geodesic& geodesic, const GeoPoint& link_start,
                                    std::span<const GeoPoint> fixes, DistanceMode mode);

}  // namespace tsd
