#pragma once

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace gwot::detail {

// Scoped flush-to-zero / denormals-are-zero mode. Entropic kernels push
// many entries into the subnormal range, where arithmetic is two orders of
// magnitude slower; values that small are zero for every metric we report.
class FlushDenormals {
public:
#if defined(__SSE2__)
    FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040U); }
    ~FlushDenormals() { _mm_setcsr(saved_); }

private:
    unsigned saved_;
#else
    FlushDenormals() = default;
#endif
public:
    FlushDenormals(const FlushDenormals&) = delete;
    FlushDenormals& operator=(const FlushDenormals&) = delete;
};

} // namespace gwot::detail
