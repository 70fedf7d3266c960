#pragma once

// Text serialization: JSON for direction sets, words and small reports, CSV
// for everything tabular. Reals are written with 17 significant digits so a
// file read back reproduces the same doubles.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spherefold/direction_set.hpp"
#include "spherefold/dynamics.hpp"
#include "spherefold/harmonics.hpp"
#include "spherefold/markov.hpp"
#include "spherefold/partition.hpp"
#include "spherefold/random_walk.hpp"

namespace spherefold::io {

using Json = nlohmann::ordered_json;

std::string format_real(double v);

/// Array of arrays, one row per direction.
Json to_json(const DirectionSet& g);
/// Reader renormalizes each row; throws PreconditionError on bad shape.
DirectionSet direction_set_from_json(const Json& j);

Json to_json(const FoldWord& w);
FoldWord fold_word_from_json(const Json& j);

Json to_json(const EvennessReport& r);
Json to_json(const ConditionReport& r);

void write_certificate_header(std::ostream& os);
void write_certificate_row(std::ostream& os, const DensityCertificate& c);

/// cell_index, x1..xd, area, count, frequency
void write_histogram_csv(std::ostream& os, const OccupationHistogram& h, const CellPartition& p);

/// x1..xd, value
void write_grid_function_csv(std::ostream& os, const GridFunction& f);
/// x1..xd, weight
void write_particle_measure_csv(std::ostream& os, const ParticleMeasure& nu);

/// n, range
void write_range_history_csv(std::ostream& os, const std::vector<double>& history);

/// degree, order, value. d = 2 uses order 0 for cos and 1 for sin.
void write_coefficients_csv(std::ostream& os, const HarmonicCoefficients& c);

/// Reads a whole file; throws PreconditionError if it cannot be opened.
std::string read_file(const std::string& path);
/// Writes `content` to `path`, replacing any existing file.
void write_file(const std::string& path, const std::string& content);

}  // namespace spherefold::io
