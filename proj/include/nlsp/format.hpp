#pragma once

#include <string>

namespace nlsp {

/// Shortest decimal string that round-trips to the same double.
std::string fmt_double(double v);

}  // namespace nlsp
