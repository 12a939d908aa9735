#include "akhiezer/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "akhiezer/error.hpp"

namespace akz {

BandSystem::BandSystem(std::vector<Band> bands) : bands_(std::move(bands)) {
  if (bands_.empty()) fail(errc::config, "band system needs at least one band");
  for (std::size_t j = 0; j < bands_.size(); ++j) {
    const Band& b = bands_[j];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi))
      fail(errc::config, "band " + std::to_string(j + 1) + " is empty or not finite");
    if (j > 0 && !(bands_[j - 1].hi < b.lo))
      fail(errc::config, "bands " + std::to_string(j) + " and " + std::to_string(j + 1) +
                             " overlap or touch");
  }
}

BandSystem BandSystem::from_endpoints(const std::vector<double>& e) {
  if (e.size() < 2 || e.size() % 2 != 0)
    fail(errc::config, "band endpoints must come in pairs a1,b1[,a2,b2,...]");
  std::vector<Band> b;
  for (std::size_t i = 0; i < e.size(); i += 2) b.push_back({e[i], e[i + 1]});
  return BandSystem(std::move(b));
}

BandSystem BandSystem::parse(const std::string& csv) {
  std::vector<double> e;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      e.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
        throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      fail(errc::config, "cannot parse band endpoint '" + item + "'");
    }
  }
  return from_endpoints(e);
}

std::vector<double> BandSystem::endpoints() const {
  std::vector<double> e;
  for (const auto& b : bands_) {
    e.push_back(b.lo);
    e.push_back(b.hi);
  }
  return e;
}

double BandSystem::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < bands_.size(); ++j) g = std::min(g, bands_[j].lo - bands_[j - 1].hi);
  return g;
}

bool BandSystem::contains(double x) const {
  return std::any_of(bands_.begin(), bands_.end(), [x](const Band& b) { return b.lo <= x && x <= b.hi; });
}

double BandSystem::distance(cplx z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& b : bands_) {
    const double x = std::clamp(z.real(), b.lo, b.hi);
    d = std::min(d, std::abs(z - cplx(x, 0.0)));
  }
  return d;
}

std::string BandSystem::str() const {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t j = 0; j < bands_.size(); ++j)
    os << (j ? " U " : "") << '[' << bands_[j].lo << ',' << bands_[j].hi << ']';
  return os.str();
}

} // namespace akz
