#ifndef LOWRES_VERSION_H_
#define LOWRES_VERSION_H_

namespace lowres {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lowres

#endif  // LOWRES_VERSION_H_
