#pragma once

#include <cstddef>
#include <vector>

namespace mmot {

// Dense row-major multi-way array of doubles. Couplings, cost tensors and
// duality-gap fields all live in this representation; shapes above
// kMaxEntries entries are rejected at construction.
class Tensor {
public:
    static constexpr std::size_t kMaxEntries = 50'000'000;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);

    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t extent(std::size_t axis) const { return shape_[axis]; }

    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    double& at(const std::vector<std::size_t>& idx) { return data_[flat_index(idx)]; }
    double at(const std::vector<std::size_t>& idx) const { return data_[flat_index(idx)]; }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const;
    // Stride of one step along `axis` in flat offsets.
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double sum() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<double> data_;
};

// Odometer increment over a shape; returns false after the last tuple.
bool next_index(std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape);

// Product of extents, with overflow care; throws like Tensor if above guard.
std::size_t checked_entry_count(const std::vector<std::size_t>& shape);

} // namespace mmot
