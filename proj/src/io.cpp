#include "fkpp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fkpp {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_front_csv(const std::filesystem::path& path, const FrontProfile& profile) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "x,phi\n";
    for (int i = 0; i < profile.grid.n_points(); ++i)
        out << fmt17(profile.grid.point(i)) << ',' << fmt17(profile.values[i]) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

FrontSamples read_front_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty front csv " + path.string());
    if (line == "x,phi\r") line.pop_back();
    if (line != "x,phi") throw IoError("front csv header must be exactly 'x,phi'");
    FrontSamples out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw IoError("front csv: malformed line " + std::to_string(lineno));
        try {
            out.x.push_back(std::stod(a));
            out.phi.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw IoError("front csv: bad number at line " + std::to_string(lineno));
        }
    }
    if (out.x.size() < 16) throw IoError("front csv: too few samples");
    double h = out.x[1] - out.x[0];
    if (!(h > 0.0)) throw IoError("front csv: x must be strictly increasing");
    for (size_t i = 1; i < out.x.size(); ++i) {
        double d = out.x[i] - out.x[i - 1];
        if (!(d > 0.0)) throw IoError("front csv: x must be strictly increasing");
        if (std::abs(d - h) > 1e-8 * std::max(1.0, std::abs(h)))
            throw IoError("front csv: x must be uniformly spaced");
    }
    return out;
}

void write_report(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& [k, v] : rows) out << k << '=' << v << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void write_op_test_csv(const std::filesystem::path& path, const std::vector<OpTestRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "test,metric,value,threshold,pass\n";
    for (const auto& r : rows)
        out << r.test << ',' << r.metric << ',' << fmt17(r.value) << ',' << fmt17(r.threshold)
            << ',' << (r.pass ? "true" : "false") << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void write_speeds_csv(const std::filesystem::path& path, const std::vector<SpeedRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "sigma,epsilon,mu_c,identity_rel_err\n";
    for (const auto& r : rows)
        out << fmt17(r.sigma) << ',' << fmt17(r.epsilon) << ',' << fmt17(r.mu_c) << ','
            << fmt17(r.identity_rel_err) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void write_plot_script(const std::filesystem::path& path, const std::string& csv_name) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "set datafile separator ','\n"
        << "set key off\n"
        << "set xlabel 'x'\n"
        << "set ylabel 'phi'\n"
        << "set grid\n"
        << "plot '" << csv_name << "' every ::1 using 1:2 with lines lw 2\n"
        << "pause -1 'press enter to close'\n";
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fkpp
