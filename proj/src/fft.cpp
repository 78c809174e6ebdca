#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace quasidisk::detail {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct FftPlan::Impl {
    fftw_plan plan = nullptr;
    int n = 0;
};

FftPlan::FftPlan(int n, Direction dir) : impl_(std::make_unique<Impl>()), n_(n) {
    if (n < 1) throw std::invalid_argument("fft size must be positive");
    impl_->n = n;
    // Plan on scratch arrays with the default alignment so later new-array
    // executes on std::vector storage stay valid.
    std::lock_guard lock(planner_mutex());
    auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    impl_->plan = fftw_plan_dft_1d(n, a, b, dir == Direction::kForward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    if (!impl_->plan) throw std::runtime_error("fftw planning failed");
}

FftPlan::~FftPlan() {
    if (impl_ && impl_->plan) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(impl_->plan);
    }
}

FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_)
        throw std::invalid_argument("fft buffer size mismatch");
    // fftw_execute_dft takes a non-const input pointer but does not write to it
    // for out-of-place plans; in-place calls pass the same buffer twice.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    if (src == dst) {
        std::vector<std::complex<double>> tmp(in.begin(), in.end());
        fftw_execute_dft(impl_->plan, reinterpret_cast<fftw_complex*>(tmp.data()), dst);
    } else {
        fftw_execute_dft(impl_->plan, src, dst);
    }
}

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in, FftPlan::Direction dir) {
    const FftPlan plan(static_cast<int>(in.size()), dir);
    std::vector<std::complex<double>> out(in.size());
    plan.execute(in, out);
    return out;
}

}  // namespace quasidisk::detail
