#ifndef KGC_VERSION_HPP
#define KGC_VERSION_HPP

namespace kgc {

inline constexpr const char* kVersion = "0.1.0";

} // namespace kgc

#endif
