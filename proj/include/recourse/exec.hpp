#pragma once

#include <cstdint>
#include <string>

namespace recourse {

// Every data-parallel kernel has a serial reference path. Both paths must
// produce bit-identical results.
enum class Exec { Serial, Parallel };

inline std::string exec_name(Exec e) { return e == Exec::Serial ? "serial" : "parallel"; }

// Caps the OpenMP worker count; 0 leaves the runtime default.
void set_thread_count(int n);
int thread_count();

}  // namespace recourse
