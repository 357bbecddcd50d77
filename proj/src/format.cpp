#include "rgl/format.hpp"

#include <cstdio>

namespace rgl {

std::string format_double_12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace rgl
