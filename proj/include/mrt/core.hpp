#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrt {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Exit-code contract of the CLI: 2 config, 3 data, 4 accuracy.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AccuracyError : std::runtime_error {
    explicit AccuracyError(const std::string& msg) : std::runtime_error(msg) {}
};

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace mrt
