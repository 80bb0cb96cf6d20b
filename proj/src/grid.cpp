#include "rmg/grid.hpp"

#include <cmath>

namespace rmg {

void GridSpec::validate() const {
  if (!(std::isfinite(re_min) && std::isfinite(re_max) && std::isfinite(im_min) &&
        std::isfinite(im_max))) {
    throw ConfigError("grid bounds must be finite");
  }
  if (!(re_max > re_min) || !(im_max > im_min)) throw ConfigError("grid requires max > min");
  if (nodes_re < 3 || nodes_im < 3) throw ConfigError("grid requires at least 3 nodes per axis");
}

}  // namespace rmg
