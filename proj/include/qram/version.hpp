#ifndef QRAM_VERSION_HPP
#define QRAM_VERSION_HPP

namespace qram {

inline constexpr const char* version_string = "0.1.0";

} // namespace qram

#endif
