#pragma once

namespace sidewalk {

inline constexpr char kVersion[] = "0.1.0";

}  // namespace sidewalk
