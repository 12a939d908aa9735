#pragma once

#include <complex>
#include <string>
#include <vector>

namespace akz {

using cplx = std::complex<double>;

struct Band {
  double lo;
  double hi;
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

/**
 * @brief Ordered disjoint real intervals [a_1,b_1] ∪ ... ∪ [a_{g+1},b_{g+1}].
 */
class BandSystem {
public:
  BandSystem() = default;
  explicit BandSystem(std::vector<Band> bands);

  /// Endpoints as a flat list a_1,b_1,a_2,b_2,...
  static BandSystem from_endpoints(const std::vector<double>& e);
  static BandSystem parse(const std::string& csv);

  int genus() const { return static_cast<int>(bands_.size()) - 1; }
  std::size_t size() const { return bands_.size(); }
  const Band& operator[](std::size_t j) const { return bands_[j]; }
  const std::vector<Band>& bands() const { return bands_; }
  std::vector<double> endpoints() const;

  double left() const { return bands_.front().lo; }
  double right() const { return bands_.back().hi; }
  double min_gap() const;

  /// Closed-set membership for real x.
  bool contains(double x) const;
  /// True when z is real and lies in some closed band.
  bool contains(cplx z) const { return z.imag() == 0.0 && contains(z.real()); }
  /// Distance from z to the union of bands.
  double distance(cplx z) const;

  std::string str() const;

private:
  std::vector<Band> bands_;
};

struct RecurrencePair {
  double a;
  double b;
};

} // namespace akz
