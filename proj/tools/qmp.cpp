#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "qmp/commands.hpp"
#include "qmp/error.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qmp::InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int emit(const qmp::CommandResult& r, const std::string& out_path) {
  std::cerr << r.log;
  if (out_path.empty()) {
    std::cout << r.output;
  } else if (!write_file(out_path, r.output)) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return qmp::kExitBadInput;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Six-atom representing measures for nonsingular quartic bivariate moment sequences"};
  app.require_subcommand(1);

  qmp::CommandFlags flags;
  std::string out_path;
  std::uint64_t seed = qmp::default_seed();
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol-rank", flags.tol_rank, "relative eigenvalue cut for rank decisions");
    sub->add_option("--tol-moment", flags.tol_moment, "relative moment residual accepted by verification");
    sub->add_option("--seed", flags.seed, "recorded seed (the solver itself is deterministic)");
    sub->add_flag("--trace", flags.trace, "include the case trace details and intermediate matrices");
    sub->add_option("--out", out_path, "write the document here instead of standard output");
  };

  std::string input, measure;
  CLI::App* solve = app.add_subcommand("solve", "compute a 6-atomic representing measure");
  solve->add_option("input", input, "instance document")->required();
  add_common(solve);

  CLI::App* classify = app.add_subcommand("classify", "conic of the column relation after rank reduction");
  classify->add_option("input", input, "instance document")->required();
  add_common(classify);

  CLI::App* normalize = app.add_subcommand("normalize", "moments after the map that makes M(1) the identity");
  normalize->add_option("input", input, "instance document")->required();
  add_common(normalize);

  CLI::App* reduce = app.add_subcommand("reduce", "u0 and the spectrum of the rank-5 remainder");
  reduce->add_option("input", input, "instance document")->required();
  add_common(reduce);

  CLI::App* verify = app.add_subcommand("verify", "check that a measure reproduces the moments");
  verify->add_option("input", input, "document with beta (and atoms, when no measure file is given)")->required();
  verify->add_option("measure", measure, "document with atoms");
  add_common(verify);

  int count = 1;
  std::string conic = "none";
  bool centered = false;
  CLI::App* gen = app.add_subcommand("gen", "random instances with known 6-atomic measures");
  gen->add_option("--count", count, "number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "generator seed (default 42, or QMP_SEED)");
  gen->add_option("--conic", conic, "put five atoms on: none, xy, parabola, circle, hyperbola");
  gen->add_flag("--centered", centered, "put the sixth atom at the weighted mean of the other five");
  gen->add_option("--out", out_path, "directory for instance_NNNN.json files");

  CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  selftest->add_option("--tol-rank", flags.tol_rank, "override the rank tolerance");
  selftest->add_option("--seed", seed, "seed for the random suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qmp::kExitBadInput;
  }

  try {
    if (*solve) return emit(qmp::cmd_solve(read_file(input), flags), out_path);
    if (*classify) return emit(qmp::cmd_classify(read_file(input), flags), out_path);
    if (*normalize) return emit(qmp::cmd_normalize(read_file(input), flags), out_path);
    if (*reduce) return emit(qmp::cmd_reduce(read_file(input), flags), out_path);
    if (*verify) {
      const std::string doc = read_file(input);
      return emit(measure.empty() ? qmp::cmd_verify(doc, flags) : qmp::cmd_verify(doc, read_file(measure), flags),
                  out_path);
    }
    if (*gen) {
      qmp::GeneratorOptions opts;
      opts.constraint = qmp::parse_constraint(conic);
      opts.centered = centered;
      const qmp::GeneratedDocuments g = qmp::cmd_gen(count, seed, opts);
      std::cerr << g.log;
      if (g.exit_code != 0) return g.exit_code;
      if (out_path.empty()) {
        for (const std::string& d : g.documents) std::cout << d;
        return 0;
      }
      std::filesystem::create_directories(out_path);
      for (std::size_t k = 0; k < g.documents.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "instance_%04zu.json", k);
        const std::string path = (std::filesystem::path(out_path) / name).string();
        if (!write_file(path, g.documents[k])) {
          std::cerr << "error: cannot write " << path << "\n";
          return qmp::kExitBadInput;
        }
      }
      return 0;
    }
    if (*selftest) {
      qmp::acceptance::Config cfg;
      cfg.seed = seed;
      if (flags.tol_rank) cfg.tol.rank = *flags.tol_rank;
      const auto results = qmp::acceptance::run_all(cfg);
      std::cout << qmp::acceptance::format_table(results);
      for (const auto& r : results)
        if (!r.pass) return qmp::kExitFailed;
      return 0;
    }
  } catch (const qmp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qmp::kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qmp::kExitNumerical;
  }
  return qmp::kExitBadInput;
}
