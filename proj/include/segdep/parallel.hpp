#ifndef SEGDEP_PARALLEL_HPP
#define SEGDEP_PARALLEL_HPP

#include <exception>
#include <mutex>

namespace segdep {

// Serial is the reference path; Parallel runs the same kernels under OpenMP
// and must produce bit-identical results.
enum class Execution { Serial, Parallel };

// Applies the SEGDEP_THREADS cap (if set) to the OpenMP runtime and returns
// the thread count in effect.
int configure_threads_from_env();

int max_threads();

// Collects the first exception thrown inside an OpenMP loop body so it can be
// rethrown after the parallel region ends.
class ErrorSlot {
 public:
  void capture() {
    std::lock_guard lock(mutex_);
    if (!error_) error_ = std::current_exception();
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace segdep

#endif  // SEGDEP_PARALLEL_HPP
