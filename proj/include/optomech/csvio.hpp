#pragma once

#include <string>
#include <vector>

#include "optomech/spectra.hpp"
#include "optomech/coherent.hpp"
#include "optomech/timedomain_types.hpp"

namespace optomech {

// CSV files carry frequencies in Hz and seconds for time; the in-memory
// structures stay in angular units. Lines starting with '#' are header
// comments: writers emit the resolved configuration there, readers skip them.

void write_spectrum_csv(const std::string& path, const Spectrum& s,
                        const std::vector<std::string>& header_comments = {});
Spectrum read_spectrum_csv(const std::string& path);

void write_coherent_csv(const std::string& path, const CoherentTrace& t,
                        const std::vector<std::string>& header_comments = {});
CoherentTrace read_coherent_csv(const std::string& path);

void write_timetrace_csv(const std::string& path, const TimeTrace& t,
                         const std::vector<std::string>& header_comments = {});
TimeTrace read_timetrace_csv(const std::string& path);

// %.12g, shared with the config writer so round-trips are stable.
std::string format_number(double v);

} // namespace optomech
