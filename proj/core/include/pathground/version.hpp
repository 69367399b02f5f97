#pragma once

namespace pathground {

inline constexpr const char* kVersion = "1.0.0";

// Version stamp of the synthetic corpus generator. Bumped whenever the
// rendering or annotation recipe changes, since regeneration from a
// (seed, version, counts) triple must stay byte-identical.
inline constexpr const char* kGeneratorVersion = "pg-gen-1";

}  // namespace pathground
