#ifndef FREEFALL_GENERATORS_HPP
#define FREEFALL_GENERATORS_HPP

namespace freefall {

// Critical points of the auxiliary Morse function on a critical circle C_k:
// one minimum m_k and one maximum M_k per circle.
enum class GeneratorKind { Min, Max };

// A generator of the cascade chain complex.
struct CascadeGenerator {
    GeneratorKind kind = GeneratorKind::Min;
    int k = 1;           // circle label
    int degree = 1;      // 2k for Max, 2k-1 for Min
    double phase = 0.0;  // location on C_k
};

} // namespace freefall

#endif
