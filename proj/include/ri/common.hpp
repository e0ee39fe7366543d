#ifndef RI_COMMON_HPP
#define RI_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ri {

// Simplex vectors are accepted when their mass is within this distance of 1,
// then renormalized; anything further off is rejected.
inline constexpr double kSimplexTol = 1e-12;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonSimplexInput : Error {
    using Error::Error;
};
struct SupportViolation : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct EmptySupport : Error {
    using Error::Error;
};
struct NonFiniteLoss : Error {
    using Error::Error;
};
struct CapacityOutOfRange : Error {
    using Error::Error;
};
struct SingularMatrix : Error {
    using Error::Error;
};
struct DimensionTooSmall : Error {
    using Error::Error;
};

// Dense row-major matrix, just enough surface for channels and loss tables.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Mat(std::size_t rows, std::size_t cols, std::vector<double> flat)
        : rows_(rows), cols_(cols), data_(std::move(flat)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionMismatch("Mat: flat size does not match rows*cols");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }
    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const std::vector<double>& flat() const { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Max-shifted log(sum(exp(v))) over the given values; -inf input entries are
// skipped (zero weight in the sum).
inline double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v)
        if (x > m) m = x;
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : v)
        if (std::isfinite(x)) acc += std::exp(x - m);
    return m + std::log(acc);
}

inline double sup_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("sup_norm_diff: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace ri

#endif  // RI_COMMON_HPP
