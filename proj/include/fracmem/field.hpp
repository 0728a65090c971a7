#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "fracmem/grid.hpp"

namespace fracmem {

/// Real scalar field on a TorusGrid, carried in a physical representation
/// (one real value per grid point), a spectral representation (one complex
/// coefficient per mode), or both. Validity tags record which side is
/// current; ensure_physical()/ensure_spectral() materialize the other on
/// demand through the grid's transforms.
class Field {
public:
    Field() = default;

    static Field zeros(std::shared_ptr<const TorusGrid> grid);
    static Field from_physical(std::shared_ptr<const TorusGrid> grid,
                               std::vector<double> values);
    static Field from_spectral(std::shared_ptr<const TorusGrid> grid,
                               std::vector<std::complex<double>> coefficients);

    bool valid() const { return static_cast<bool>(grid_); }
    const TorusGrid& grid() const { return *grid_; }
    const std::shared_ptr<const TorusGrid>& grid_ptr() const { return grid_; }

    bool has_physical() const { return physical_valid_; }
    bool has_spectral() const { return spectral_valid_; }

    const std::vector<double>& physical() const;
    const std::vector<std::complex<double>>& spectral() const;

    Field& ensure_physical();
    Field& ensure_spectral();

    /// Largest |imaginary part| discarded by the most recent spectral-to-
    /// physical transform of this field. A real field transported through
    /// Hermitian-symmetric operations keeps this at roundoff level.
    double imag_residue() const { return imag_residue_; }

    /// Drops one representation (testing aid for staleness behaviour).
    void invalidate_physical() { physical_valid_ = false; }
    void invalidate_spectral() { spectral_valid_ = false; }

    /// Mutable access; marks the other representation stale.
    std::vector<double>& mutable_physical();
    std::vector<std::complex<double>>& mutable_spectral();

private:
    std::shared_ptr<const TorusGrid> grid_;
    std::vector<double> physical_;
    std::vector<std::complex<double>> spectral_;
    bool physical_valid_ = false;
    bool spectral_valid_ = false;
    double imag_residue_ = 0.0;
};

/// Throws std::invalid_argument unless both fields live on compatible grids.
void require_same_grid(const Field& a, const Field& b);

}  // namespace fracmem
