#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "qmp/moments.hpp"
#include "qmp/options.hpp"
#include "qmp/trace.hpp"
#include "qmp/transforms.hpp"

namespace qmp {

using Json = nlohmann::ordered_json;

/// Parsed instance file. Options left out of the file stay empty.
struct InputDocument {
  MomentSequence beta{4};
  std::optional<double> tol_rank;
  std::optional<double> tol_moment;
  std::optional<std::uint64_t> seed;
};

/// Parses {"beta": {"00": .., "04": ..}, "options": {...}}. The beta object must hold exactly
/// the 15 keys of degree <= 4 with finite values and beta_00 > 0. Other top-level members are
/// ignored so solver output can be fed back in. Throws InputError.
InputDocument parse_input(const std::string& text);

/// Atoms from the "atoms" array of a document, each {"x", "y", "w"}. Throws InputError.
AtomicMeasure parse_atoms(const Json& doc);

Json parse_json(const std::string& text);

/// Serializes with every double printed to 17 significant digits and two-space indentation.
std::string dump(const Json& doc);

Json to_json(const MomentSequence& beta);
Json to_json(const AtomicMeasure& mu);
Json to_json(const DegreeOneTransform& psi);
Json to_json(const VerificationReport& r);
Json to_json(const CaseTrace& t);
Json to_json(const Eigen::MatrixXd& m);

}  // namespace qmp
