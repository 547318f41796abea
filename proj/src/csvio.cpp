#include "optomech/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw ValidationError("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ValidationError("cannot open for reading: " + path);
    return f;
}

void emit_comments(std::ofstream& f, const std::vector<std::string>& comments) {
    for (const auto& c : comments)
        f << "# " << c << "\n";
}

std::vector<double> split_fields(const std::string& line, size_t expect,
                                 const std::string& path, int lineno) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(std::strtod(cell.c_str(), nullptr));
    if (out.size() != expect) {
        throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(expect) + " columns");
    }
    return out;
}

template <typename RowFn>
void read_rows(const std::string& path, size_t columns, const std::string& header,
               RowFn&& row) {
    auto f = open_in(path);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind(header, 0) == 0)
                continue; // column header row
        }
        row(split_fields(line, columns, path, lineno));
    }
}

} // namespace

void write_spectrum_csv(const std::string& path, const Spectrum& s,
                        const std::vector<std::string>& header_comments) {
    auto f = open_out(path);
    emit_comments(f, header_comments);
    f << "freq_hz,value\n";
    for (size_t i = 0; i < s.grid.size(); ++i)
        f << format_number(s.grid[i] / kTwoPi) << "," << format_number(s.values[i]) << "\n";
}

Spectrum read_spectrum_csv(const std::string& path) {
    Spectrum s;
    read_rows(path, 2, "freq_hz", [&](const std::vector<double>& v) {
        s.grid.push_back(v[0] * kTwoPi);
        s.values.push_back(v[1]);
    });
    if (s.grid.empty())
        throw ValidationError(path + ": no data rows");
    return s;
}

void write_coherent_csv(const std::string& path, const CoherentTrace& t,
                        const std::vector<std::string>& header_comments) {
    auto f = open_out(path);
    emit_comments(f, header_comments);
    f << "freq_hz,re,im\n";
    for (size_t i = 0; i < t.grid.size(); ++i) {
        f << format_number(t.grid[i] / kTwoPi) << "," << format_number(t.response[i].real())
          << "," << format_number(t.response[i].imag()) << "\n";
    }
}

CoherentTrace read_coherent_csv(const std::string& path) {
    CoherentTrace t;
    read_rows(path, 3, "freq_hz", [&](const std::vector<double>& v) {
        t.grid.push_back(v[0] * kTwoPi);
        t.response.emplace_back(v[1], v[2]);
    });
    if (t.grid.empty())
        throw ValidationError(path + ": no data rows");
    return t;
}

void write_timetrace_csv(const std::string& path, const TimeTrace& t,
                         const std::vector<std::string>& header_comments) {
    auto f = open_out(path);
    emit_comments(f, header_comments);
    f << "t_s,drive,homodyne,displacement\n";
    for (size_t i = 0; i < t.times.size(); ++i) {
        f << format_number(t.times[i]) << "," << format_number(t.drive[i]) << ","
          << format_number(t.homodyne[i]) << "," << format_number(t.displacement[i]) << "\n";
    }
}

TimeTrace read_timetrace_csv(const std::string& path) {
    TimeTrace t;
    read_rows(path, 4, "t_s", [&](const std::vector<double>& v) {
        t.times.push_back(v[0]);
        t.drive.push_back(v[1]);
        t.homodyne.push_back(v[2]);
        t.displacement.push_back(v[3]);
    });
    if (t.times.empty())
        throw ValidationError(path + ": no data rows");
    return t;
}

} // namespace optomech
