#ifndef FREEFALL_GF2_HPP
#define FREEFALL_GF2_HPP

#include <cstdint>
#include <vector>

namespace freefall {

// Dense matrix over GF(2), rows packed into 64-bit words.
class Gf2Matrix {
  public:
    Gf2Matrix() = default;
    Gf2Matrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool get(int i, int j) const;
    void set(int i, int j, bool v);

    Gf2Matrix multiply(const Gf2Matrix& other) const;
    bool is_zero() const;
    int rank() const;  // Gaussian elimination

  private:
    int rows_ = 0, cols_ = 0, words_ = 0;
    std::vector<uint64_t> w_;
};

} // namespace freefall

#endif
