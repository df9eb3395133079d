#pragma once

namespace sarms {

/// Applies the SARMS3D_THREADS cap (if set) to the OpenMP runtime and
/// returns the resulting worker count. Throws std::invalid_argument for a
/// malformed value.
int configure_threads_from_env();

int max_threads();
void set_threads(int n);

}  // namespace sarms
