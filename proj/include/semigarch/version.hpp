#ifndef SEMIGARCH_VERSION_HPP
#define SEMIGARCH_VERSION_HPP

namespace semigarch {

inline constexpr const char* kVersion = "0.1.0";

} // namespace semigarch

#endif
