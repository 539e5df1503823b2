#pragma once

#include <string_view>

namespace wavesim {

std::string_view library_version();

} // namespace wavesim
