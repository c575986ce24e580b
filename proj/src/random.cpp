#include "illiq/random.hpp"

#include <boost/math/distributions/normal.hpp>

namespace illiq::rng {

namespace {
const boost::math::normal_distribution<double> kStandardNormal{0.0, 1.0};
}

double normal_quantile(double p) { return boost::math::quantile(kStandardNormal, p); }

double normal_cdf(double x) { return boost::math::cdf(kStandardNormal, x); }

}  // namespace illiq::rng
