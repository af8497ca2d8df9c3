// Reference IoU of two boxes given as coordinates. Shared by the scalar kernel
// and the vector kernels' tail loops so both paths round identically.
inline double iou_reference(double l1, double t1, double r1, double b1, double l2, double t2,
                            double r2, double b2) {
  const double a1 = (r1 - l1) * (b1 - t1);
  const double a2 = (r2 - l2) * (b2 - t2);
  double iw = (r1 < r2 ? r1 : r2) - (l1 > l2 ? l1 : l2);
  iw = iw > 0.0 ? iw : 0.0;
  double ih = (b1 < b2 ? b1 : b2) - (t1 > t2 ? t1 : t2);
  ih = ih > 0.0 ? ih : 0.0;
  const double inter = iw * ih;
  const double uni = (a1 + a2) - inter;
  if (!(a1 > 0.0) || !(a2 > 0.0) || !(uni > 0.0)) return 0.0;
  return inter / uni;
}
