#pragma once

namespace dphide {

/// Threads used by the replication kernels. 0 restores the OpenMP default.
void set_thread_count(int threads);
int thread_count();

/// Value of DPHIDE_THREADS when set to a positive integer, else 0.
int threads_from_environment();

}  // namespace dphide
