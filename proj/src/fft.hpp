#pragma once

// Thin RAII wrapper over FFTW for in-library use. Plans are created under a
// global lock (the FFTW planner is not thread-safe); execution through the
// new-array interface is safe from any thread.

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace quasidisk::detail {

class FftPlan {
public:
    enum class Direction { kForward, kBackward };  // exp(-i...) / exp(+i...), both unnormalized

    FftPlan(int n, Direction dir);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&&) noexcept;
    FftPlan& operator=(FftPlan&&) noexcept;

    int size() const { return n_; }
    // in and out must hold size() elements; in-place is allowed.
    void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int n_ = 0;
};

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in, FftPlan::Direction dir);

}  // namespace quasidisk::detail
