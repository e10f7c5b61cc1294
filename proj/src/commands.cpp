#include "qmp/commands.hpp"

#include <cstdlib>
#include <functional>

#include "qmp/conic.hpp"
#include "qmp/error.hpp"
#include "qmp/io.hpp"
#include "qmp/rank_reduction.hpp"
#include "qmp/solver.hpp"

namespace qmp {

namespace {

Tolerances tolerances(const InputDocument& in, const CommandFlags& flags) {
  Tolerances tol;
  if (in.tol_rank) tol.rank = *in.tol_rank;
  if (in.tol_moment) tol.moment = *in.tol_moment;
  if (flags.tol_rank) tol.rank = *flags.tol_rank;
  if (flags.tol_moment) tol.moment = *flags.tol_moment;
  return tol;
}

Json error_document(const char* kind, const std::string& message, const CaseTrace* trace) {
  Json doc = {{"error", {{"kind", kind}, {"message", message}}}};
  if (trace != nullptr) doc["trace"] = to_json(*trace);
  return doc;
}

// Runs a command body and maps the error hierarchy onto exit codes.
CommandResult guarded(const std::function<CommandResult()>& body) {
  auto failed = [](int code, const char* kind, const std::string& what, const CaseTrace* trace) {
    CommandResult r;
    r.exit_code = code;
    r.output = dump(error_document(kind, what, trace));
    r.log = std::string("error: ") + what + "\n";
    return r;
  };
  try {
    return body();
  } catch (const InputError& e) {
    return failed(kExitBadInput, "input", e.what(), nullptr);
  } catch (const NotPositiveDefiniteError& e) {
    return failed(kExitNotPositive, "not_positive_definite", e.what(), nullptr);
  } catch (const NumericalFailure& e) {
    return failed(kExitNumerical, "numerical_failure", e.what(), e.trace());
  } catch (const UnsupportedCaseError& e) {
    return failed(kExitNumerical, "unsupported_case", e.what(), nullptr);
  } catch (const PreconditionError& e) {
    return failed(kExitNumerical, "precondition", e.what(), nullptr);
  } catch (const std::exception& e) {
    return failed(kExitNumerical, "internal", e.what(), nullptr);
  }
}

Json relation_json(const ConicRelation& rel) {
  Json c = Json::array();
  for (const double v : rel.coefficients) c.push_back(v);
  return c;
}

CommandResult report_result(Json doc, const VerificationReport& rep) {
  CommandResult r;
  r.exit_code = rep.success ? kExitOk : kExitFailed;
  r.output = dump(doc);
  r.log = std::string(rep.success ? "verified" : "verification failed") + ": " + std::to_string(rep.atom_count) +
          " atoms, relative residual " + format_number(rep.max_rel_residual) + "\n";
  return r;
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QMP_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return 42;
}

CommandResult cmd_solve(const std::string& input, const CommandFlags& flags) {
  return guarded([&] {
    const InputDocument in = parse_input(input);
    const Tolerances tol = tolerances(in, flags);
    const Solution s = solve_nonsingular(in.beta, tol);

    Json doc;
    doc["beta"] = to_json(in.beta);
    doc["atoms"] = to_json(s.measure);
    doc["report"] = to_json(s.report);
    doc["trace"] = to_json(s.trace);
    Json chain = Json::array();
    for (const DegreeOneTransform& psi : s.chain) chain.push_back(to_json(psi));
    doc["transforms"] = chain;
    if (flags.trace) {
      Json m;
      m["M2"] = to_json(moment_matrix(in.beta, 2).entries);
      m["normalized_M2"] = to_json(moment_matrix(s.normalization.normalized, 2).entries);
      m["reduced_M2"] = to_json(s.reduction.reduced.entries);
      m["reduced_spectrum"] = to_json(Eigen::MatrixXd(s.reduction.spectrum.eigenvalues.transpose()));
      m["relation"] = relation_json(s.relation);
      m["working_M3"] = to_json(s.working_extension.m3.entries);
      m["normalized_M3"] = to_json(s.extension.m3.entries);
      m["normalized_moments6"] = to_json(s.extension.moments);
      doc["matrices"] = m;
    }
    CommandResult r;
    r.output = dump(doc);
    r.log = "solved: " + s.report.branch + ", " + std::to_string(s.report.atom_count) + " atoms, relative residual " +
            format_number(s.report.max_rel_residual) + "\n";
    return r;
  });
}

CommandResult cmd_classify(const std::string& input, const CommandFlags& flags) {
  return guarded([&] {
    const InputDocument in = parse_input(input);
    const Tolerances tol = tolerances(in, flags);
    const Normalization n = normalize(in.beta);
    const RankReduction red = reduce(n.normalized, tol);
    const ConicRelation rel = column_relation(red.reduced, red.rank_tol_used);
    const ConicClass cls = classify(rel, tol.conic);
    Json doc;
    doc["conic"] = std::string(to_string(cls.type));
    doc["canonical_form"] = std::string(to_string(cls.target));
    doc["relation"] = relation_json(rel);
    doc["relation_residual"] = rel.residual;
    doc["delta"] = cls.delta;
    doc["delta3"] = cls.delta3;
    doc["u0"] = red.u0;
    CommandResult r;
    r.output = dump(doc);
    r.log = "conic: " + std::string(to_string(cls.type)) + "\n";
    return r;
  });
}

CommandResult cmd_normalize(const std::string& input, const CommandFlags&) {
  return guarded([&] {
    const InputDocument in = parse_input(input);
    const Normalization n = normalize(in.beta);
    Json doc;
    doc["beta"] = to_json(n.normalized);
    doc["transform"] = to_json(n.transform);
    doc["d2"] = n.d2;
    doc["d3"] = n.d3;
    CommandResult r;
    r.output = dump(doc);
    r.log = "normalized: M(1) = I\n";
    return r;
  });
}

CommandResult cmd_reduce(const std::string& input, const CommandFlags& flags) {
  return guarded([&] {
    const InputDocument in = parse_input(input);
    const Tolerances tol = tolerances(in, flags);
    const Normalization n = normalize(in.beta);
    const RankReduction red = reduce(n.normalized, tol);
    Json doc;
    doc["u0"] = red.u0;
    doc["rank"] = red.residual_rank;
    doc["first_entry"] = red.first_entry;
    doc["rank_tol_used"] = red.rank_tol_used;
    Json spec = Json::array();
    for (Eigen::Index k = 0; k < red.spectrum.eigenvalues.size(); ++k) spec.push_back(red.spectrum.eigenvalues(k));
    doc["spectrum"] = spec;
    if (flags.trace) doc["reduced_M2"] = to_json(red.reduced.entries);
    CommandResult r;
    r.output = dump(doc);
    r.log = "u0 = " + format_number(red.u0) + ", reduced rank " + std::to_string(red.residual_rank) + "\n";
    return r;
  });
}

CommandResult cmd_verify(const std::string& input, const CommandFlags& flags) {
  return cmd_verify(input, input, flags);
}

CommandResult cmd_verify(const std::string& moments, const std::string& measure, const CommandFlags& flags) {
  return guarded([&] {
    const InputDocument in = parse_input(moments);
    Json doc = parse_json(measure);
    // Generator output keeps its measure under "truth".
    if (doc.is_object() && !doc.contains("atoms") && doc.contains("truth")) doc = doc["truth"];
    const AtomicMeasure mu = parse_atoms(doc);
    const Tolerances tol = tolerances(in, flags);
    const VerificationReport rep = verify_measure(in.beta, mu, tol.moment, tol.weight);
    Json out;
    out["report"] = to_json(rep);
    return report_result(out, rep);
  });
}

GeneratedDocuments cmd_gen(int count, std::uint64_t seed, const GeneratorOptions& opts) {
  GeneratedDocuments out;
  if (count < 1) {
    out.exit_code = kExitBadInput;
    out.log = "error: count must be at least 1\n";
    return out;
  }
  try {
    const std::vector<Instance> inst = generate_instances(count, seed, opts);
    for (std::size_t k = 0; k < inst.size(); ++k) {
      Json doc;
      doc["beta"] = to_json(inst[k].beta);
      doc["truth"] = {{"atoms", to_json(inst[k].truth)}};
      doc["instance"] = {{"seed", seed},
                         {"index", k},
                         {"constraint", to_string(opts.constraint)},
                         {"centered", opts.centered},
                         {"condition", inst[k].condition}};
      out.documents.push_back(dump(doc));
    }
    out.log = "generated " + std::to_string(inst.size()) + " instances\n";
  } catch (const Error& e) {
    out.documents.clear();
    out.exit_code = kExitNumerical;
    out.log = std::string("error: ") + e.what() + "\n";
  }
  return out;
}

}  // namespace qmp
