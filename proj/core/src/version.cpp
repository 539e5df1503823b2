#include "wavesim/version.hpp"

namespace wavesim {

std::string_view library_version() { return WAVESIM_VERSION; }

} // namespace wavesim
