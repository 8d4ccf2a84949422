#include "routes.hpp"

#include <random>

#include "turnid/rng.hpp"

namespace turnid::testing {

RouteSpec random_detection_route(std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x524f555445ULL);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto sign = [&] { return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0; };

  RouteSpec r;
  r.start = {48.70 + uniform(0.0, 0.1), 11.40 + uniform(0.0, 0.1)};
  r.start_heading_deg = uniform(0.0, 360.0);
  r.elements.push_back(RouteElement::straight(uniform(180.0, 250.0)));

  const int features = std::uniform_int_distribution<int>(3, 5)(rng);
  const int planted_slot = std::uniform_int_distribution<int>(0, features - 1)(rng);
  for (int f = 0; f < features; ++f) {
    const int kind = f == planted_slot ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
    switch (kind) {
      case 0:
        r.elements.push_back(RouteElement::turn(sign() * uniform(72.0, 120.0), uniform(8.0, 25.0), 0.0, true));
        break;
      case 1:
        r.elements.push_back(RouteElement::turn(sign() * 60.0, uniform(8.0, 20.0), 0.0, false));
        break;
      case 2: {
        // Drivers enter at up to 10 m/s (apex factor jitter) and speed up after
        // the apex, to at most 16.5 m/s. Size the arc for the harmonic mean of the
        // two so it lasts at least 12.5 s.
        const double angle = uniform(80.0, 110.0);
        const double speed = 8.0;
        const double worst_mean_speed = 2.0 / (1.0 / 10.0 + 1.0 / 16.5);
        const double radius = worst_mean_speed * uniform(12.5, 14.0) / (angle * 3.14159265358979 / 180.0);
        r.elements.push_back(RouteElement::turn(sign() * angle, radius, speed, false));
        break;
      }
      default: {
        const int bends = std::uniform_int_distribution<int>(3, 5)(rng);
        double s = sign();
        for (int b = 0; b < bends; ++b) {
          if (b > 0) r.elements.push_back(RouteElement::straight(uniform(15.0, 30.0)));
          r.elements.push_back(RouteElement::turn(s * uniform(20.0, 35.0), 40.0, 0.0, false));
          s = -s;
        }
        break;
      }
    }
    r.elements.push_back(RouteElement::straight(uniform(180.0, 250.0)));
  }
  return r;
}

}  // namespace turnid::testing
