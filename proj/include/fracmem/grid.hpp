#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace fracmem {

/// Uniform periodic grid on the box [-L/2, L/2)^n with N modes per axis.
///
/// Owns the Fourier transform plans shared by every field living on it.
/// Transforms use the normalized-forward convention: a physical sample
/// vector maps to coefficients c_k with
///   u(x) = sum_k c_k exp(i xi_k . (x + L/2)),
/// xi_k = 2 pi k / L, k in {-N/2, ..., N/2 - 1} per axis (phases are
/// anchored at the first grid sample, the box corner). With this
/// convention the discrete Parseval identity reads
///   sum_x |u(x)|^2 (L/N)^n = L^n sum_k |c_k|^2.
class TorusGrid {
public:
    static constexpr std::size_t default_point_budget = std::size_t{1} << 22;

    static std::shared_ptr<const TorusGrid> make(
        int dim, double box_length, int modes_per_axis,
        std::size_t point_budget = default_point_budget);

    ~TorusGrid();
    TorusGrid(const TorusGrid&) = delete;
    TorusGrid& operator=(const TorusGrid&) = delete;

    int dim() const { return dim_; }
    int modes_per_axis() const { return modes_; }
    double box_length() const { return length_; }
    std::size_t num_points() const { return points_; }
    double cell_volume() const { return cell_volume_; }
    double box_volume() const { return box_volume_; }

    /// Signed integer mode number along one axis for a flattened index.
    int mode_number(std::size_t flat, int axis) const;
    /// Physical coordinate along one axis for a flattened index.
    double coordinate(std::size_t flat, int axis) const;

    /// |xi|^2 per flattened mode.
    const std::vector<double>& xi_squared() const { return xi_squared_; }
    /// |xi|^(2*exponent) per flattened mode; the zero mode maps to zero.
    std::vector<double> symbol(double exponent) const;
    /// Two-thirds-rule keep mask: 1 where |k_axis| <= N/3 on every axis.
    const std::vector<std::uint8_t>& dealias_keep() const { return dealias_keep_; }

    /// Grids are interchangeable when dimension, box and resolution agree.
    bool compatible_with(const TorusGrid& other) const {
        return dim_ == other.dim_ && modes_ == other.modes_ && length_ == other.length_;
    }

    /// In-place normalized transforms on caller storage of size num_points().
    void forward(std::complex<double>* data) const;   // physical -> spectral
    void backward(std::complex<double>* data) const;  // spectral -> physical

private:
    TorusGrid(int dim, double box_length, int modes_per_axis, std::size_t point_budget);

    int dim_;
    int modes_;
    double length_;
    std::size_t points_;
    double cell_volume_;
    double box_volume_;
    std::vector<double> xi_squared_;
    std::vector<std::uint8_t> dealias_keep_;
    std::vector<std::size_t> stride_;

    void* plan_forward_ = nullptr;
    void* plan_backward_ = nullptr;
    void* scratch_ = nullptr;  // fftw-aligned buffer the plans were created on
    mutable std::mutex transform_mutex_;
};

}  // namespace fracmem
