#include "mtrp/kernels.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "mtrp/errors.hpp"

namespace mtrp::kernels {

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

// Batched in-place 1-D transforms. Planning is serialized (FFTW's planner is
// not thread safe); execution through fftw_execute_dft is.
Plan plan_batched(int n, int howmany, int stride, int dist, int sign) {
    const std::size_t extent = static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(stride) +
                               static_cast<std::size_t>(howmany - 1) * static_cast<std::size_t>(dist) + 1;
    std::vector<Complex> scratch(extent);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_plan p = fftw_plan_many_dft(1, &n, howmany, as_fftw(scratch.data()), nullptr, stride, dist,
                                     as_fftw(scratch.data()), nullptr, stride, dist, sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw ContractError("FFTW planning failed");
    return Plan(p);
}

void check_rd_inputs(const CsiTensor& g, std::span<const double> range_window, std::span<const double> doppler_window,
                     std::size_t n_range) {
    if (range_window.size() != g.n_subcarriers()) throw ContractError("range window length != subcarrier count");
    if (doppler_window.size() != g.n_occasions()) throw ContractError("Doppler window length != occasion count");
    if (n_range < g.n_subcarriers()) throw ContractError("range FFT size smaller than the PRS subcarrier count");
}

}  // namespace

// ---------------------------------------------------------------------------
// CSI synthesis

void synthesize_csi_reference(std::span<const PathComponent> paths, const PrsGrid& grid, const ArrayConfig& array,
                              CsiTensor& out) {
    const std::size_t N = array.size(), K = grid.frequencies_hz.size(), M = grid.occasion_times_s.size();
    out = CsiTensor(N, K, M);
    for (const auto& p : paths) {
        const auto a = array_response(array, p.aoa);
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t m = 0; m < M; ++m) {
                for (std::size_t k = 0; k < K; ++k) {
                    const double phase = -2.0 * kPi * grid.frequencies_hz[k] * p.delay_s +
                                         2.0 * kPi * p.doppler_hz * grid.occasion_times_s[m];
                    out.at(n, k, m) += p.gain * std::polar(1.0, phase) * a[n];
                }
            }
        }
    }
}

void synthesize_csi_parallel(std::span<const PathComponent> paths, const PrsGrid& grid, const ArrayConfig& array,
                             CsiTensor& out) {
    const std::size_t N = array.size(), K = grid.frequencies_hz.size(), M = grid.occasion_times_s.size();
    out = CsiTensor(N, K, M);

    // Rank-one factors per path: spatial (n), frequency (k), slow time (m).
    std::vector<std::vector<Complex>> spatial, freq, slow;
    std::vector<Complex> stat(N * K, Complex(0.0, 0.0));
    for (const auto& p : paths) {
        auto a = array_response(array, p.aoa);
        for (auto& v : a) v *= p.gain;
        std::vector<Complex> b(K);
        for (std::size_t k = 0; k < K; ++k) b[k] = std::polar(1.0, -2.0 * kPi * grid.frequencies_hz[k] * p.delay_s);
        if (p.doppler_hz == 0.0) {
            for (std::size_t n = 0; n < N; ++n)
                for (std::size_t k = 0; k < K; ++k) stat[n * K + k] += a[n] * b[k];
            continue;
        }
        std::vector<Complex> c(M);
        for (std::size_t m = 0; m < M; ++m) c[m] = std::polar(1.0, 2.0 * kPi * p.doppler_hz * grid.occasion_times_s[m]);
        spatial.push_back(std::move(a));
        freq.push_back(std::move(b));
        slow.push_back(std::move(c));
    }

    const auto rows = static_cast<std::ptrdiff_t>(N * M);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t row = 0; row < rows; ++row) {
        const auto n = static_cast<std::size_t>(row) / M;
        const auto m = static_cast<std::size_t>(row) % M;
        auto dst = out.row(n, m);
        std::copy_n(stat.begin() + static_cast<std::ptrdiff_t>(n * K), K, dst.begin());
        for (std::size_t p = 0; p < spatial.size(); ++p) {
            const Complex scale = spatial[p][n] * slow[p][m];
            const Complex* b = freq[p].data();
            for (std::size_t k = 0; k < K; ++k) dst[k] += scale * b[k];
        }
    }
}

// ---------------------------------------------------------------------------
// Range / Doppler

void range_doppler_reference(const CsiTensor& g, std::span<const double> range_window,
                             std::span<const double> doppler_window, std::size_t n_range, bool mean_subtraction,
                             std::vector<Complex>& cube) {
    check_rd_inputs(g, range_window, doppler_window, n_range);
    const std::size_t N = g.n_antennas(), K = g.n_subcarriers(), M = g.n_occasions(), R = n_range;
    cube.assign(N * M * R, Complex(0.0, 0.0));
    std::vector<Complex> profile(M * R);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t r = 0; r < R; ++r) {
                Complex acc(0.0, 0.0);
                for (std::size_t k = 0; k < K; ++k) {
                    const double phase = 2.0 * kPi * static_cast<double>((k * r) % R) / static_cast<double>(R);
                    acc += range_window[k] * g.at(n, k, m) * std::polar(1.0, phase);
                }
                profile[m * R + r] = acc / std::sqrt(static_cast<double>(R));
            }
        }
        if (mean_subtraction) {
            for (std::size_t r = 0; r < R; ++r) {
                Complex mean(0.0, 0.0);
                for (std::size_t m = 0; m < M; ++m) mean += profile[m * R + r];
                mean /= static_cast<double>(M);
                for (std::size_t m = 0; m < M; ++m) profile[m * R + r] -= mean;
            }
        }
        for (std::size_t d = 0; d < M; ++d) {
            for (std::size_t r = 0; r < R; ++r) {
                Complex acc(0.0, 0.0);
                for (std::size_t m = 0; m < M; ++m) {
                    const double phase = -2.0 * kPi * static_cast<double>((m * d) % M) / static_cast<double>(M);
                    acc += doppler_window[m] * profile[m * R + r] * std::polar(1.0, phase);
                }
                cube[(n * M + d) * R + r] = acc / std::sqrt(static_cast<double>(M));
            }
        }
    }
}

void range_doppler_parallel(const CsiTensor& g, std::span<const double> range_window,
                            std::span<const double> doppler_window, std::size_t n_range, bool mean_subtraction,
                            std::vector<Complex>& cube) {
    check_rd_inputs(g, range_window, doppler_window, n_range);
    const std::size_t N = g.n_antennas(), K = g.n_subcarriers(), M = g.n_occasions(), R = n_range;
    cube.assign(N * M * R, Complex(0.0, 0.0));
    if (N == 0 || M == 0) return;

    const Plan range_plan = plan_batched(static_cast<int>(R), static_cast<int>(M), 1, static_cast<int>(R), FFTW_BACKWARD);
    const Plan doppler_plan = plan_batched(static_cast<int>(M), static_cast<int>(R), static_cast<int>(R), 1, FFTW_FORWARD);

    std::vector<double> wr(K), wd(M);
    for (std::size_t k = 0; k < K; ++k) wr[k] = range_window[k] / std::sqrt(static_cast<double>(R));
    for (std::size_t m = 0; m < M; ++m) wd[m] = doppler_window[m] / std::sqrt(static_cast<double>(M));

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ni = 0; ni < static_cast<std::ptrdiff_t>(N); ++ni) {
        const auto n = static_cast<std::size_t>(ni);
        Complex* block = cube.data() + n * M * R;
        for (std::size_t m = 0; m < M; ++m) {
            const auto src = g.row(n, m);
            Complex* dst = block + m * R;
            for (std::size_t k = 0; k < K; ++k) dst[k] = wr[k] * src[k];
        }
        fftw_execute_dft(range_plan.get(), as_fftw(block), as_fftw(block));

        if (mean_subtraction) {
            std::vector<Complex> mean(R, Complex(0.0, 0.0));
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t r = 0; r < R; ++r) mean[r] += block[m * R + r];
            for (auto& v : mean) v /= static_cast<double>(M);
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t r = 0; r < R; ++r) block[m * R + r] -= mean[r];
        }
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t r = 0; r < R; ++r) block[m * R + r] *= wd[m];
        fftw_execute_dft(doppler_plan.get(), as_fftw(block), as_fftw(block));
    }
}

void noncoherent_power(std::span<const Complex> cube, std::size_t n_antennas, std::size_t n_cells,
                       std::vector<double>& power) {
    if (cube.size() != n_antennas * n_cells) throw ContractError("cube size mismatch");
    power.assign(n_cells, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(n_cells); ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        double acc = 0.0;
        for (std::size_t n = 0; n < n_antennas; ++n) acc += std::norm(cube[n * n_cells + c]);
        power[c] = acc;
    }
}

// ---------------------------------------------------------------------------
// CA-CFAR training statistics

namespace {

void check_window(std::size_t n_range, std::size_t n_doppler, const CfarWindow& w) {
    if (w.guard_range < 0 || w.guard_doppler < 0 || w.train_range < 0 || w.train_doppler < 0) {
        throw ContractError("CFAR window sizes must be non-negative");
    }
    if (w.train_range == 0 && w.train_doppler == 0) throw ContractError("CFAR window has no training cells");
    if (static_cast<std::size_t>(2 * (w.guard_doppler + w.train_doppler) + 1) > n_doppler ||
        static_cast<std::size_t>(2 * (w.guard_range + w.train_range) + 1) > n_range) {
        throw ContractError("CFAR window does not fit within the map");
    }
}

}  // namespace

void cfar_training_reference(std::span<const double> power, std::size_t n_range, std::size_t n_doppler,
                             const CfarWindow& w, std::vector<double>& sum, std::vector<int>& count) {
    check_window(n_range, n_doppler, w);
    if (power.size() != n_range * n_doppler) throw ContractError("power map size mismatch");
    sum.assign(power.size(), 0.0);
    count.assign(power.size(), 0);
    const int wr = w.guard_range + w.train_range, wd = w.guard_doppler + w.train_doppler;
    const auto R = static_cast<int>(n_range), D = static_cast<int>(n_doppler);
    for (int d = 0; d < D; ++d) {
        for (int r = 0; r < R; ++r) {
            double s = 0.0;
            int c = 0;
            for (int dd = -wd; dd <= wd; ++dd) {
                for (int dr = -wr; dr <= wr; ++dr) {
                    if (std::abs(dd) <= w.guard_doppler && std::abs(dr) <= w.guard_range) continue;
                    const int rr = r + dr;
                    if (rr < 0 || rr >= R) continue;
                    const int dw = ((d + dd) % D + D) % D;
                    s += power[static_cast<std::size_t>(dw * R + rr)];
                    ++c;
                }
            }
            sum[static_cast<std::size_t>(d * R + r)] = s;
            count[static_cast<std::size_t>(d * R + r)] = c;
        }
    }
}

void cfar_training_parallel(std::span<const double> power, std::size_t n_range, std::size_t n_doppler,
                            const CfarWindow& w, std::vector<double>& sum, std::vector<int>& count) {
    check_window(n_range, n_doppler, w);
    if (power.size() != n_range * n_doppler) throw ContractError("power map size mismatch");
    const auto R = static_cast<std::ptrdiff_t>(n_range), D = static_cast<std::ptrdiff_t>(n_doppler);
    const int wr = w.guard_range + w.train_range, wd = w.guard_doppler + w.train_doppler;
    const int gr = w.guard_range;

    // Per row: full-width window sums and the two side segments flanking the
    // guard cells. Only non-negative terms are added, so cells whose training
    // region is exactly zero stay exactly zero.
    std::vector<double> full(power.size()), side(power.size());
    std::vector<int> full_n(n_range), side_n(n_range);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t d = 0; d < D; ++d) {
        const double* row = power.data() + d * R;
        for (std::ptrdiff_t r = 0; r < R; ++r) {
            double f = 0.0, s = 0.0;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, r - wr), hi = std::min<std::ptrdiff_t>(R - 1, r + wr);
            for (std::ptrdiff_t x = lo; x <= hi; ++x) {
                f += row[x];
                if (x < r - gr || x > r + gr) s += row[x];
            }
            full[static_cast<std::size_t>(d * R + r)] = f;
            side[static_cast<std::size_t>(d * R + r)] = s;
        }
    }
    for (std::ptrdiff_t r = 0; r < R; ++r) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, r - wr), hi = std::min<std::ptrdiff_t>(R - 1, r + wr);
        const std::ptrdiff_t glo = std::max<std::ptrdiff_t>(0, r - gr), ghi = std::min<std::ptrdiff_t>(R - 1, r + gr);
        full_n[static_cast<std::size_t>(r)] = static_cast<int>(hi - lo + 1);
        side_n[static_cast<std::size_t>(r)] = static_cast<int>((hi - lo + 1) - (ghi - glo + 1));
    }

    sum.assign(power.size(), 0.0);
    count.assign(power.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t d = 0; d < D; ++d) {
        for (std::ptrdiff_t r = 0; r < R; ++r) {
            double s = 0.0;
            for (int dd = -wd; dd <= wd; ++dd) {
                const std::ptrdiff_t dw = ((d + dd) % D + D) % D;
                s += (std::abs(dd) <= w.guard_doppler ? side : full)[static_cast<std::size_t>(dw * R + r)];
            }
            const auto idx = static_cast<std::size_t>(d * R + r);
            sum[idx] = s;
            count[idx] = (2 * w.guard_doppler + 1) * side_n[static_cast<std::size_t>(r)] +
                         2 * w.train_doppler * full_n[static_cast<std::size_t>(r)];
        }
    }
}

// ---------------------------------------------------------------------------
// Beam scan

namespace {

std::size_t check_beam(std::span<const Complex> conj_steering, std::span<const Complex> snapshot) {
    if (snapshot.empty() || conj_steering.size() % snapshot.size() != 0) {
        throw ContractError("steering matrix does not match snapshot length");
    }
    return conj_steering.size() / snapshot.size();
}

}  // namespace

void beam_scan_reference(std::span<const Complex> conj_steering, std::span<const Complex> snapshot,
                         std::vector<double>& power) {
    const std::size_t n_angles = check_beam(conj_steering, snapshot), N = snapshot.size();
    power.assign(n_angles, 0.0);
    for (std::size_t i = 0; i < n_angles; ++i) {
        Complex acc(0.0, 0.0);
        for (std::size_t n = 0; n < N; ++n) acc += conj_steering[i * N + n] * snapshot[n];
        power[i] = std::norm(acc);
    }
}

void beam_scan_parallel(std::span<const Complex> conj_steering, std::span<const Complex> snapshot,
                        std::vector<double>& power) {
    const std::size_t n_angles = check_beam(conj_steering, snapshot), N = snapshot.size();
    power.assign(n_angles, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n_angles); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Complex* a = conj_steering.data() + i * N;
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            re += a[n].real() * snapshot[n].real() - a[n].imag() * snapshot[n].imag();
            im += a[n].real() * snapshot[n].imag() + a[n].imag() * snapshot[n].real();
        }
        power[i] = re * re + im * im;
    }
}

}  // namespace mtrp::kernels
