#include "qmp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "qmp/error.hpp"

namespace qmp {

namespace {

double finite_number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw InputError(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InputError(what + " must be finite");
  return x;
}

void write(std::string& out, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, val] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        write(out, val, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Rows of numbers stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) out += flat ? ", " : ",\n";
        if (!flat) out += pad;
        write(out, v[k], indent + 2);
      }
      out += flat ? "]" : "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("not valid JSON: ") + e.what());
  }
}

InputDocument parse_input(const std::string& text) {
  const Json doc = parse_json(text);
  if (!doc.is_object()) throw InputError("document must be a JSON object");
  if (!doc.contains("beta") || !doc["beta"].is_object()) throw InputError("document needs a \"beta\" object");
  const Json& b = doc["beta"];

  InputDocument in;
  std::set<std::string> expected;
  for (const Monomial m : monomials_up_to(4)) expected.insert(exponent_key(m));
  for (const auto& [key, val] : b.items())
    if (!expected.count(key)) throw InputError("unexpected moment key \"" + key + "\"");
  for (const Monomial m : monomials_up_to(4)) {
    const std::string key = exponent_key(m);
    if (!b.contains(key)) throw InputError("moment \"" + key + "\" is missing");
    in.beta.set(m, finite_number(b[key], "moment \"" + key + "\""));
  }
  if (!(in.beta.get(0, 0) > 0)) throw InputError("beta_00 must be positive");

  if (doc.contains("options")) {
    const Json& o = doc["options"];
    if (!o.is_object()) throw InputError("\"options\" must be an object");
    for (const auto& [key, val] : o.items()) {
      if (key == "tol_rank") {
        in.tol_rank = finite_number(val, "tol_rank");
      } else if (key == "tol_moment") {
        in.tol_moment = finite_number(val, "tol_moment");
      } else if (key == "seed") {
        if (!val.is_number_unsigned()) throw InputError("seed must be a nonnegative integer");
        in.seed = val.get<std::uint64_t>();
      } else {
        throw InputError("unknown option \"" + key + "\"");
      }
    }
    if (in.tol_rank && !(*in.tol_rank > 0)) throw InputError("tol_rank must be positive");
    if (in.tol_moment && !(*in.tol_moment > 0)) throw InputError("tol_moment must be positive");
  }
  return in;
}

AtomicMeasure parse_atoms(const Json& doc) {
  if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array())
    throw InputError("document needs an \"atoms\" array");
  AtomicMeasure mu;
  for (const Json& a : doc["atoms"]) {
    if (!a.is_object() || !a.contains("x") || !a.contains("y") || !a.contains("w"))
      throw InputError("each atom needs x, y and w");
    mu.atoms.push_back({finite_number(a["x"], "atom x"), finite_number(a["y"], "atom y"),
                        finite_number(a["w"], "atom w")});
  }
  return mu;
}

std::string dump(const Json& doc) {
  std::string out;
  write(out, doc, 0);
  out += "\n";
  return out;
}

Json to_json(const MomentSequence& beta) {
  Json j = Json::object();
  for (const Monomial m : monomials_up_to(beta.degree())) j[exponent_key(m)] = beta[m];
  return j;
}

Json to_json(const AtomicMeasure& mu) {
  Json j = Json::array();
  for (const Atom& a : mu.atoms) j.push_back({{"x", a.x}, {"y", a.y}, {"w", a.w}});
  return j;
}

Json to_json(const DegreeOneTransform& psi) {
  return {{"a", psi.a}, {"b", psi.b}, {"c", psi.c}, {"d", psi.d}, {"e", psi.e}, {"f", psi.f}};
}

Json to_json(const VerificationReport& r) {
  Json j = {{"max_abs_residual", r.max_abs_residual},
            {"max_rel_residual", r.max_rel_residual},
            {"psd_margin", r.psd_margin},
            {"atom_count", r.atom_count},
            {"positive_weights", r.positive_weights},
            {"success", r.success}};
  if (!r.branch.empty()) j["branch"] = r.branch;
  return j;
}

Json to_json(const CaseTrace& t) {
  Json j = Json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  if (t.branch) j["branch"] = std::string(to_string(*t.branch));
  if (t.conic) j["conic"] = std::string(to_string(*t.conic));
  put("u0", t.u0);
  if (t.parameters) {
    const LineParameters& p = *t.parameters;
    j["parameters"] = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"e", p.e},
                       {"f", p.f}, {"g", p.g}, {"h", p.h}, {"u", p.u}};
  }
  put("structure_residual", t.structure_residual);
  put("e1_e3_residual", t.e1_e3_residual);
  put("kappa", t.kappa);
  put("lambda", t.lambda);
  put("mu", t.mu);
  put("nu", t.nu);
  put("k", t.k);
  put("k_closed_form", t.k_closed_form);
  put("xi", t.xi);
  put("eta", t.eta);
  put("theta", t.theta);
  put("discriminant", t.discriminant);
  put("f_value", t.f_value);
  put("branch_discriminant", t.branch_discriminant);
  put("beta50", t.beta50);
  put("beta05", t.beta05);
  put("beta41", t.beta41);
  put("p", t.p);
  put("q", t.q);
  put("distinguished_weight", t.distinguished_weight);
  put("hankel_residual", t.hankel_residual);
  if (t.newton_starts) j["newton_starts"] = *t.newton_starts;
  if (!t.notes.empty()) j["notes"] = t.notes;
  return j;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qmp
