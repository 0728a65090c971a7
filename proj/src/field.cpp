#include "fracmem/field.hpp"

#include <cmath>
#include <stdexcept>

namespace fracmem {

Field Field::zeros(std::shared_ptr<const TorusGrid> grid) {
    Field f;
    f.grid_ = std::move(grid);
    f.physical_.assign(f.grid_->num_points(), 0.0);
    f.spectral_.assign(f.grid_->num_points(), {0.0, 0.0});
    f.physical_valid_ = true;
    f.spectral_valid_ = true;
    return f;
}

Field Field::from_physical(std::shared_ptr<const TorusGrid> grid,
                           std::vector<double> values) {
    if (values.size() != grid->num_points())
        throw std::invalid_argument("physical sample count does not match the grid");
    Field f;
    f.grid_ = std::move(grid);
    f.physical_ = std::move(values);
    f.physical_valid_ = true;
    return f;
}

Field Field::from_spectral(std::shared_ptr<const TorusGrid> grid,
                           std::vector<std::complex<double>> coefficients) {
    if (coefficients.size() != grid->num_points())
        throw std::invalid_argument("spectral coefficient count does not match the grid");
    Field f;
    f.grid_ = std::move(grid);
    f.spectral_ = std::move(coefficients);
    f.spectral_valid_ = true;
    return f;
}

const std::vector<double>& Field::physical() const {
    if (!physical_valid_)
        throw std::logic_error("physical representation is stale; call ensure_physical()");
    return physical_;
}

const std::vector<std::complex<double>>& Field::spectral() const {
    if (!spectral_valid_)
        throw std::logic_error("spectral representation is stale; call ensure_spectral()");
    return spectral_;
}

Field& Field::ensure_spectral() {
    if (spectral_valid_) return *this;
    if (!physical_valid_) throw std::logic_error("field has no valid representation");
    spectral_.resize(physical_.size());
    for (std::size_t i = 0; i < physical_.size(); ++i)
        spectral_[i] = std::complex<double>(physical_[i], 0.0);
    grid_->forward(spectral_.data());
    spectral_valid_ = true;
    return *this;
}

Field& Field::ensure_physical() {
    if (physical_valid_) return *this;
    if (!spectral_valid_) throw std::logic_error("field has no valid representation");
    std::vector<std::complex<double>> work(spectral_);
    grid_->backward(work.data());
    physical_.resize(work.size());
    double residue = 0.0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        physical_[i] = work[i].real();
        residue = std::max(residue, std::abs(work[i].imag()));
    }
    imag_residue_ = residue;
    physical_valid_ = true;
    return *this;
}

std::vector<double>& Field::mutable_physical() {
    ensure_physical();
    spectral_valid_ = false;
    return physical_;
}

std::vector<std::complex<double>>& Field::mutable_spectral() {
    ensure_spectral();
    physical_valid_ = false;
    return spectral_;
}

void require_same_grid(const Field& a, const Field& b) {
    if (!a.valid() || !b.valid())
        throw std::invalid_argument("field is not attached to a grid");
    if (a.grid_ptr().get() == b.grid_ptr().get()) return;
    if (!a.grid().compatible_with(b.grid()))
        throw std::invalid_argument("fields live on mismatched grids");
}

}  // namespace fracmem
