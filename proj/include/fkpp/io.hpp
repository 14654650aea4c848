#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fkpp/model.hpp"
#include "fkpp/speed_finder.hpp"

namespace fkpp {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 17-significant-digit decimal: round-trips doubles exactly in text.
std::string fmt17(double v);

/// front.csv with header exactly `x,phi`.
void write_front_csv(const std::filesystem::path& path, const FrontProfile& profile);

/// Parses front.csv back into samples; rejects non-monotone or non-uniform x.
struct FrontSamples {
    std::vector<double> x;
    std::vector<double> phi;
};
FrontSamples read_front_csv(const std::filesystem::path& path);

/// Ordered key=value report.
void write_report(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& rows);

struct OpTestRow {
    std::string test;
    std::string metric;
    double value;
    double threshold;
    bool pass;
};
void write_op_test_csv(const std::filesystem::path& path, const std::vector<OpTestRow>& rows);

struct SpeedRow {
    double sigma, epsilon, mu_c, identity_rel_err;
};
void write_speeds_csv(const std::filesystem::path& path, const std::vector<SpeedRow>& rows);

void write_plot_script(const std::filesystem::path& path, const std::string& csv_name);

}  // namespace fkpp
