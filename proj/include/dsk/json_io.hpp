// Canonical JSON formats for sets, measures, flats and reports, plus
// manifest helpers. All emission goes through ordered_json with fixed key
// order so identical inputs produce byte-identical files.
#pragma once

#include <json.hpp>
#include <string>

#include "dsk/analysis.hpp"
#include "dsk/corpus.hpp"
#include "dsk/geometry.hpp"
#include "dsk/measure.hpp"
#include "dsk/sumset.hpp"
#include "dsk/types.hpp"
#include "dsk/uniformize.hpp"

namespace dsk {

using Json = nlohmann::ordered_json;

Json to_json(const GridSet& a);
GridSet gridset_from_json(const Json& j);

Json to_json(const GridMeasureQ& mu);
Json to_json(const GridMeasureD& mu);
GridMeasureQ measure_q_from_json(const Json& j);
GridMeasureD measure_d_from_json(const Json& j);

Json to_json(const AffineFlat& f);
AffineFlat flat_from_json(const Json& j);

Json to_json(const UniformProfile& p);
Json to_json(const EnergyResult& e);
Json to_json(const UniformizationResult& r, const std::string& mode);
Json to_json(const CenterResult& r);
Json to_json(const StructureReport& r);
Json to_json(const Theorem2Ledger& r);
Json to_json(const Theorem1Ledger& r);
Json to_json(const PorosityResult& r);
Json to_json(const FupResult& r);
Json to_json(const EnergyExperimentReport& r);
Json to_json(const FlatteningReport& r);

Json to_json(const CorpusSpec& s);
CorpusSpec corpus_spec_from_json(const Json& j);

// Parses with line/column diagnostics on failure.
Json parse_file(const std::string& path);
void write_file(const std::string& path, const Json& j);
std::string file_sha256(const std::string& path);

// Standard output wrapper: config echo, module versions, input hashes.
Json make_manifest(const Json& config, const std::vector<std::pair<std::string, std::string>>& input_hashes,
                   Json result);

}  // namespace dsk
