#include "mmot/tensor.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace mmot {

std::size_t checked_entry_count(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw std::invalid_argument("tensor shape must be nonempty");
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0) throw std::invalid_argument("tensor extent must be positive");
        if (n > Tensor::kMaxEntries / e + 1)
            throw std::length_error("tensor shape exceeds the 5e7 entry guard");
        n *= e;
    }
    if (n > Tensor::kMaxEntries)
        throw std::length_error("tensor shape exceeds the 5e7 entry guard: " +
                                std::to_string(n) + " entries");
    return n;
}

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    std::size_t n = checked_entry_count(shape_);
    strides_.assign(shape_.size(), 1);
    for (std::size_t a = shape_.size(); a-- > 1;)
        strides_[a - 1] = strides_[a] * shape_[a];
    data_.assign(n, 0.0);
}

std::size_t Tensor::flat_index(const std::vector<std::size_t>& idx) const {
    if (idx.size() != shape_.size()) throw std::invalid_argument("index rank mismatch");
    std::size_t f = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        if (idx[a] >= shape_[a]) throw std::out_of_range("tensor index out of range");
        f += idx[a] * strides_[a];
    }
    return f;
}

double Tensor::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

bool next_index(std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
    for (std::size_t a = idx.size(); a-- > 0;) {
        if (++idx[a] < shape[a]) return true;
        idx[a] = 0;
    }
    return false;
}

} // namespace mmot
