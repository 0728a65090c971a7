#include "fracmem/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fracmem {

namespace {

// FFTW plan creation is not thread safe; executing distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::shared_ptr<const TorusGrid> TorusGrid::make(int dim, double box_length,
                                                 int modes_per_axis,
                                                 std::size_t point_budget) {
    return std::shared_ptr<const TorusGrid>(
        new TorusGrid(dim, box_length, modes_per_axis, point_budget));
}

TorusGrid::TorusGrid(int dim, double box_length, int modes_per_axis,
                     std::size_t point_budget)
    : dim_(dim), modes_(modes_per_axis), length_(box_length) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("grid dim must be 1, 2 or 3");
    if (!(box_length > 0.0))
        throw std::invalid_argument("grid box_length must be positive");
    if (modes_per_axis < 8 || modes_per_axis % 2 != 0)
        throw std::invalid_argument("grid modes_per_axis must be even and at least 8");

    points_ = 1;
    for (int a = 0; a < dim_; ++a) {
        if (points_ > point_budget / static_cast<std::size_t>(modes_))
            throw std::invalid_argument("grid point count exceeds the configured budget");
        points_ *= static_cast<std::size_t>(modes_);
    }
    if (points_ > point_budget)
        throw std::invalid_argument("grid point count exceeds the configured budget");

    cell_volume_ = std::pow(length_ / modes_, dim_);
    box_volume_ = std::pow(length_, dim_);

    stride_.resize(dim_);
    stride_[dim_ - 1] = 1;
    for (int a = dim_ - 2; a >= 0; --a)
        stride_[a] = stride_[a + 1] * static_cast<std::size_t>(modes_);

    const double base = 2.0 * std::numbers::pi / length_;
    const int cutoff = modes_ / 3;
    xi_squared_.resize(points_);
    dealias_keep_.assign(points_, 1);
    for (std::size_t i = 0; i < points_; ++i) {
        double s = 0.0;
        bool keep = true;
        for (int a = 0; a < dim_; ++a) {
            const int k = mode_number(i, a);
            const double xi = base * k;
            s += xi * xi;
            if (std::abs(k) > cutoff) keep = false;
        }
        xi_squared_[i] = s;
        dealias_keep_[i] = keep ? 1 : 0;
    }

    scratch_ = fftw_malloc(sizeof(fftw_complex) * points_);
    if (!scratch_) throw std::bad_alloc();
    std::memset(scratch_, 0, sizeof(fftw_complex) * points_);

    int n[3] = {modes_, modes_, modes_};
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* buf = static_cast<fftw_complex*>(scratch_);
    plan_forward_ = fftw_plan_dft(dim_, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_backward_ = fftw_plan_dft(dim_, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_forward_ || !plan_backward_)
        throw std::runtime_error("fftw plan creation failed");
}

TorusGrid::~TorusGrid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_forward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    if (plan_backward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
    if (scratch_) fftw_free(scratch_);
}

int TorusGrid::mode_number(std::size_t flat, int axis) const {
    const int idx = static_cast<int>((flat / stride_[axis]) % static_cast<std::size_t>(modes_));
    return idx <= modes_ / 2 - 1 ? idx : idx - modes_;
}

double TorusGrid::coordinate(std::size_t flat, int axis) const {
    const int idx = static_cast<int>((flat / stride_[axis]) % static_cast<std::size_t>(modes_));
    return -0.5 * length_ + idx * (length_ / modes_);
}

std::vector<double> TorusGrid::symbol(double exponent) const {
    std::vector<double> mult(points_);
    for (std::size_t i = 0; i < points_; ++i)
        mult[i] = xi_squared_[i] == 0.0 ? 0.0 : std::pow(xi_squared_[i], exponent);
    return mult;
}

void TorusGrid::forward(std::complex<double>* data) const {
    std::lock_guard<std::mutex> lock(transform_mutex_);
    auto* buf = static_cast<fftw_complex*>(scratch_);
    std::memcpy(buf, data, sizeof(fftw_complex) * points_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), buf, buf);
    const double scale = 1.0 / static_cast<double>(points_);
    for (std::size_t i = 0; i < points_; ++i) {
        data[i] = std::complex<double>(buf[i][0] * scale, buf[i][1] * scale);
    }
}

void TorusGrid::backward(std::complex<double>* data) const {
    std::lock_guard<std::mutex> lock(transform_mutex_);
    auto* buf = static_cast<fftw_complex*>(scratch_);
    std::memcpy(buf, data, sizeof(fftw_complex) * points_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), buf, buf);
    std::memcpy(static_cast<void*>(data), buf, sizeof(fftw_complex) * points_);
}

}  // namespace fracmem
