#include "freefall/gf2.hpp"

#include <stdexcept>

namespace freefall {

Gf2Matrix::Gf2Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64),
      w_(static_cast<size_t>(rows) * ((cols + 63) / 64), 0) {}

bool Gf2Matrix::get(int i, int j) const {
    return (w_[static_cast<size_t>(i) * words_ + j / 64] >> (j % 64)) & 1u;
}

void Gf2Matrix::set(int i, int j, bool v) {
    uint64_t& word = w_[static_cast<size_t>(i) * words_ + j / 64];
    const uint64_t bit = uint64_t(1) << (j % 64);
    if (v) word |= bit;
    else word &= ~bit;
}

Gf2Matrix Gf2Matrix::multiply(const Gf2Matrix& other) const {
    if (cols_ != other.rows_)
        throw std::invalid_argument("Gf2Matrix::multiply: size mismatch");
    Gf2Matrix out(rows_, other.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k)
            if (get(i, k))
                for (int w = 0; w < out.words_; ++w)
                    out.w_[static_cast<size_t>(i) * out.words_ + w] ^=
                        other.w_[static_cast<size_t>(k) * other.words_ + w];
    return out;
}

bool Gf2Matrix::is_zero() const {
    for (uint64_t x : w_)
        if (x) return false;
    return true;
}

int Gf2Matrix::rank() const {
    Gf2Matrix m = *this;
    int rank = 0;
    for (int col = 0; col < cols_ && rank < rows_; ++col) {
        int piv = -1;
        for (int i = rank; i < rows_; ++i)
            if (m.get(i, col)) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != rank)
            for (int w = 0; w < words_; ++w)
                std::swap(m.w_[static_cast<size_t>(piv) * words_ + w],
                          m.w_[static_cast<size_t>(rank) * words_ + w]);
        for (int i = 0; i < rows_; ++i) {
            if (i == rank || !m.get(i, col)) continue;
            for (int w = 0; w < words_; ++w)
                m.w_[static_cast<size_t>(i) * words_ + w] ^=
                    m.w_[static_cast<size_t>(rank) * words_ + w];
        }
        ++rank;
    }
    return rank;
}

} // namespace freefall
