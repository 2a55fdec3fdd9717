#include "tangentscope/csv_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tangentscope::csv {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_grid(const std::string& path, const GridFunction& f) {
    auto out = open_out(path);
    out << "theta,value\n";
    for (int k = 0; k < f.size(); ++k)
        out << format_double(f.theta(k)) << ',' << format_double(f[k]) << '\n';
}

GridFunction read_grid(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line); // header
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() < 2) throw std::runtime_error("bad grid row in " + path);
        vals.push_back(std::stod(f[1]));
    }
    int n = static_cast<int>(vals.size());
    return GridFunction(n, std::move(vals));
}

void write_complex_grid(const std::string& path, const ComplexGridFunction& f) {
    auto out = open_out(path);
    out << "theta,re,im\n";
    for (int k = 0; k < f.n; ++k)
        out << format_double(f.theta(k)) << ',' << format_double(f.samples[k].real()) << ','
            << format_double(f.samples[k].imag()) << '\n';
}

ComplexGridFunction read_complex_grid(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    ComplexGridFunction g;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() < 3) throw std::runtime_error("bad complex grid row in " + path);
        g.samples.emplace_back(std::stod(f[1]), std::stod(f[2]));
    }
    g.n = static_cast<int>(g.samples.size());
    return g;
}

void write_arcs(const std::string& path, const ArcSet& a) {
    auto out = open_out(path);
    out << "start,end\n";
    for (const Arc& arc : a.arcs())
        out << format_double(arc.start) << ',' << format_double(arc.end) << '\n';
}

ArcSet read_arcs(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    std::vector<Arc> arcs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() < 2) throw std::runtime_error("bad arc row in " + path);
        arcs.push_back({std::stod(f[0]), std::stod(f[1])});
    }
    return ArcSet(std::move(arcs));
}

void write_step(const std::string& path, const std::vector<StepPiece>& pieces) {
    auto out = open_out(path);
    out << "start,end,value\n";
    for (const auto& p : pieces)
        out << format_double(p.arc.start) << ',' << format_double(p.arc.end) << ','
            << format_double(p.value) << '\n';
}

std::vector<StepPiece> read_step(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    std::vector<StepPiece> pieces;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() < 3) throw std::runtime_error("bad step row in " + path);
        pieces.push_back({{std::stod(f[0]), std::stod(f[1])}, std::stod(f[2])});
    }
    return pieces;
}

std::vector<std::pair<double, GridFunction>> read_kernel_manifest(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    auto dir = std::filesystem::path(path).parent_path();
    std::vector<std::pair<double, GridFunction>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() < 2) throw std::runtime_error("bad manifest row in " + path);
        double r = std::stod(f[0]);
        std::filesystem::path p(f[1]);
        if (p.is_relative()) p = dir / p;
        out.emplace_back(1.0 - r, read_grid(p.string()));
    }
    return out;
}

} // namespace tangentscope::csv
