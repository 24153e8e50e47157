#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace bicm {

// Dense row-major matrix of doubles. Deliberately minimal: the point is
// complete control over storage layout and accumulation order, which the
// reproducibility contracts of the tape and the Monte-Carlo harness rely on.
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), d_(size_t(rows) * cols, 0.0) {}
    Mat(int rows, int cols, std::initializer_list<double> v) : Mat(rows, cols) {
        assert(v.size() == d_.size());
        size_t i = 0;
        for (double x : v) d_[i++] = x;
    }

    static Mat zeros(int rows, int cols) { return Mat(rows, cols); }
    static Mat constant(int rows, int cols, double v) {
        Mat m(rows, cols);
        for (auto& x : m.d_) x = v;
        return m;
    }
    static Mat scalar(double v) {
        Mat m(1, 1);
        m.d_[0] = v;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return d_.size(); }
    bool empty() const { return d_.empty(); }

    double& operator()(int r, int c) { return d_[size_t(r) * cols_ + c]; }
    double operator()(int r, int c) const { return d_[size_t(r) * cols_ + c]; }
    double& operator[](size_t i) { return d_[i]; }
    double operator[](size_t i) const { return d_[i]; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }
    double* row(int r) { return d_.data() + size_t(r) * cols_; }
    const double* row(int r) const { return d_.data() + size_t(r) * cols_; }

    void set_zero() { std::fill(d_.begin(), d_.end(), 0.0); }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_; }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> d_;
};

}  // namespace bicm
