#ifndef HDGNS_PARALLEL_HPP
#define HDGNS_PARALLEL_HPP

#include <functional>

namespace hdgns {

/// Global worker count for cell-parallel loops (default 1).
void set_num_threads(int n);
int num_threads();

/// Run fn(i) for i in [0, n). Work is chunked over the configured number of
/// threads; each index writes only its own slot, so results are deterministic.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace hdgns

#endif
