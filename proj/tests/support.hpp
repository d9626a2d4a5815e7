#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "medpipe/audio.hpp"

namespace testsupport {

inline medpipe::AudioBuffer make_tone(double freq_hz, int rate_hz, double seconds,
                                      double amplitude, double phase = 0.0) {
    const auto n = static_cast<std::size_t>(std::llround(seconds * rate_hz));
    std::vector<double> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        samples[i] =
            amplitude * std::sin(2.0 * M_PI * freq_hz * static_cast<double>(i) / rate_hz + phase);
    }
    return medpipe::AudioBuffer(std::move(samples), rate_hz, 1);
}

inline double rms_of(const std::vector<double>& x, std::size_t begin = 0,
                     std::size_t end = static_cast<std::size_t>(-1)) {
    if (end > x.size()) end = x.size();
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
    return std::sqrt(acc / static_cast<double>(end - begin));
}

// Single-frequency DFT evaluated directly; the oracle the FFT and the filter
// tests are checked against.
inline std::complex<double> dft_at(const std::vector<double>& x, double freq_hz, int rate_hz,
                                   std::size_t begin = 0,
                                   std::size_t end = static_cast<std::size_t>(-1)) {
    if (end > x.size()) end = x.size();
    std::complex<double> acc{0.0, 0.0};
    const double w = -2.0 * M_PI * freq_hz / rate_hz;
    for (std::size_t i = begin; i < end; ++i) {
        acc += x[i] * std::polar(1.0, w * static_cast<double>(i));
    }
    return acc;
}

// Plain Levenshtein distance, no backtrace; written independently of the
// library's alignment code.
inline std::size_t edit_distance(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "medpipe-test-XXXXXX").string();
        if (mkdtemp(tmpl.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string quoted = "'";
    for (char c : s) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted.push_back(c);
        }
    }
    quoted.push_back('\'');
    return quoted;
}

// Runs the installed CLI binary through the shell, capturing both streams.
inline CliResult run_cli(const std::vector<std::string>& args) {
    static const TempDir io_dir;
    static int counter = 0;
    const std::string out_path = io_dir.file("out-" + std::to_string(counter));
    const std::string err_path = io_dir.file("err-" + std::to_string(counter));
    ++counter;

    std::string cmd = shell_quote(MEDPIPE_CLI_PATH);
    for (const std::string& a : args) {
        cmd.push_back(' ');
        cmd += shell_quote(a);
    }
    cmd += " >" + shell_quote(out_path) + " 2>" + shell_quote(err_path);
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

}  // namespace testsupport
