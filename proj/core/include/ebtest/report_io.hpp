#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "ebtest/empirical_bayes.hpp"
#include "ebtest/procedures.hpp"
#include "ebtest/simulation.hpp"
#include "ebtest/theory.hpp"

namespace ebtest {

enum class OutputFormat { json, csv };

/// "json" or "csv"; throws InputError otherwise.
OutputFormat parse_format(std::string_view name);

/// Shortest decimal string that parses back to exactly `v`. NaN and infinities
/// are written as "nan", "inf", "-inf".
std::string format_double(double v);

/// One decimal real per line; surrounding whitespace and blank lines are ignored.
/// Throws InputError naming the line on a malformed or non-finite entry, and on
/// input with no values at all.
Observations read_observations(std::istream& in);
Observations read_observations(const std::filesystem::path& path);

/// Writes one value per line in format_double form, readable by read_observations.
void write_observations(std::ostream& out, std::span<const double> x);

/// Flat "key = value" lines; '#' starts a comment. Throws InputError with the line
/// number on a line without '=' or a repeated key.
std::map<std::string, std::string> parse_key_value(std::istream& in);
std::map<std::string, std::string> parse_key_value(const std::filesystem::path& path);

void write_analysis(std::ostream& out, const Observations& data, const AnalysisResult& result,
                    OutputFormat format);

/// JSON holds the configuration, summaries, bands and every replicate; CSV has
/// one row per replicate.
void write_simulation(std::ostream& out, const SimulationReport& report, OutputFormat format);

/// JSON object, or "key,value" rows for CSV.
void write_theory(std::ostream& out, const TheoryReport& report, OutputFormat format);

}  // namespace ebtest
