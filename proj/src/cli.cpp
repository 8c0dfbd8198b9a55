#include "kocycle/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kocycle/homotopy.hpp"
#include "kocycle/kgraph.hpp"
#include "kocycle/ktheory.hpp"
#include "kocycle/skeleton.hpp"
#include "kocycle/unitary_cocycle.hpp"
#include "kocycle/validation.hpp"

namespace kocycle::cli {

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ParseError("cannot open " + path);
  try {
    return nlohmann::json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    file << text;
    file.flush();
    if (!file) throw InvalidArgument("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

// Document sink: --output writes atomically, otherwise stdout.
void emit(const std::string& output, std::ostream& out,
          const std::string& text) {
  if (output.empty()) {
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
  } else {
    write_atomic(output, text);
  }
}

IntMatrix to_int_matrix(const CountMatrix& m) {
  IntMatrix out(static_cast<std::size_t>(m.rows()),
                static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  return out;
}

struct Args {
  std::string skeleton_file;
  std::string second_file;
  std::string third_file;
  std::string output;
  double check_tol = 1e-9;
  double search_tol = 1e-8;
  int samples = 64;
  std::uint64_t limit = EnumerationOptions{}.limit;
  std::uint64_t seed = 0;
  bool count_only = false;
};

int cmd_validate(const Args& a, std::ostream& out) {
  Skeleton s = Skeleton::load(a.skeleton_file);
  ValidationReport report = validate_skeleton(s);
  bool deeper = report.ok();
  if (deeper && !a.second_file.empty()) {
    FactorisationRule rule =
        FactorisationRule::from_json(s, read_json(a.second_file));
    if (a.third_file.empty()) {
      report.merge(validate_factorisation(s, rule));
    } else {
      CubicalCocycle phi = CubicalCocycle::from_json(s, read_json(a.third_file));
      report.merge(validate_cubical_cocycle(s, rule, phi));
    }
  } else if (!deeper && !a.second_file.empty()) {
    report.note("deeper layers skipped: the skeleton is invalid");
  }
  out << report.to_json().dump(2) << '\n';
  return report.ok() ? 0 : 1;
}

int cmd_ktheory(const Args& a, std::ostream& out, std::ostream& err) {
  Skeleton s = Skeleton::load(a.skeleton_file);
  if (s.rank() != 2) {
    err << "Evans formula requires k=2\n";
    return 1;
  }
  ValidationReport report = validate_skeleton(s);
  if (!report.ok()) {
    err << "invalid skeleton: " << report.violations.front().message << '\n';
    return 1;
  }
  KTheory kt = ktheory_2graph(to_int_matrix(adjacency_matrix(s, 1)),
                              to_int_matrix(adjacency_matrix(s, 2)));
  emit(a.output, out, kt.to_json().dump(2));
  return 0;
}

int cmd_cocycle_derive(const Args& a, std::ostream& out) {
  auto s = std::make_shared<const Skeleton>(Skeleton::load(a.skeleton_file));
  FactorisationRule rule =
      FactorisationRule::from_json(*s, read_json(a.second_file));
  CubicalCocycle phi = CubicalCocycle::from_json(*s, read_json(a.third_file));
  UnitaryCocycle u = from_kgraph(s, rule, phi);
  emit(a.output, out, u.to_json().dump(2));
  return 0;
}

int cmd_cocycle_check(const Args& a, std::ostream& out) {
  auto s = std::make_shared<const Skeleton>(Skeleton::load(a.skeleton_file));
  UnitaryCocycle u = UnitaryCocycle::from_json(s, read_json(a.second_file));
  ResidualReport report = residual_report(u);
  emit(a.output, out, report.to_json(*s).dump(2));
  return report.residual <= a.check_tol ? 0 : 1;
}

int cmd_path(bool search, const Args& a, std::ostream& out,
             std::ostream& err) {
  auto s = std::make_shared<const Skeleton>(Skeleton::load(a.skeleton_file));
  UnitaryCocycle u0 = UnitaryCocycle::from_json(s, read_json(a.second_file));
  UnitaryCocycle u1 = UnitaryCocycle::from_json(s, read_json(a.third_file));
  if (!search) {
    CocyclePath path = geodesic_path(u0, u1, a.samples);
    emit(a.output, out, path.to_json().dump(2));
    return 0;
  }
  PathSearchOptions opts;
  opts.samples = a.samples;
  opts.tol = a.search_tol;
  opts.seed = a.seed;
  PathSearchResult result = path_search(u0, u1, opts);
  if (result.success) {
    emit(a.output, out, result.path.to_json().dump(2));
    return 0;
  }
  emit(a.output, out, result.failure_report().dump(2));
  err << "path search failed: " << result.message << '\n';
  return 3;
}

int cmd_enumerate(const Args& a, std::ostream& out, std::ostream& err) {
  Skeleton s = Skeleton::load(a.skeleton_file);
  EnumerationOptions opts;
  opts.limit = a.limit;

  EnumerationResult result;
  if (a.count_only) {
    result = enumerate_factorisations(s, opts, {});
    nlohmann::json doc = {{"count", result.count},
                          {"status", result.status == EnumerationStatus::Complete
                                         ? "complete"
                                         : result.status ==
                                                   EnumerationStatus::LimitReached
                                               ? "limit_reached"
                                               : "truncated"}};
    emit(a.output, out, doc.dump());
  } else {
    std::ostringstream buffer;
    std::ostream& stream = a.output.empty() ? out : buffer;
    result = enumerate_factorisations(s, opts, [&](const FactorisationRule& r) {
      stream << r.to_json(s).dump() << '\n';
    });
    if (!a.output.empty()) write_atomic(a.output, buffer.str());
  }
  if (result.status == EnumerationStatus::Truncated) {
    err << "enumeration truncated: node budget exhausted after "
        << result.count << " rules\n";
    return 4;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"k-coloured skeletons, factorisation rules, unitary cocycles"};
  app.name("kocycle");
  app.require_subcommand(1);

  Args a;
  std::function<int()> action;

  app.add_option("--seed", a.seed, "seed for stochastic components");

  auto* validate = app.add_subcommand(
      "validate", "check a skeleton and optional rule/cocycle layers");
  validate->add_option("skeleton", a.skeleton_file)->required();
  validate->add_option("factorisation", a.second_file);
  validate->add_option("cocycle", a.third_file);
  validate->callback([&] { action = [&] { return cmd_validate(a, out); }; });

  auto* ktheory = app.add_subcommand(
      "ktheory", "K-groups of a 2-graph from its vertex matrices");
  ktheory->add_option("skeleton", a.skeleton_file)->required();
  ktheory->add_option("--output", a.output);
  ktheory->callback(
      [&] { action = [&] { return cmd_ktheory(a, out, err); }; });

  auto* cocycle = app.add_subcommand("cocycle", "derive or check cocycles");
  cocycle->require_subcommand(1);
  auto* derive = cocycle->add_subcommand(
      "derive", "unitary cocycle of a rule and cubical phases");
  derive->add_option("skeleton", a.skeleton_file)->required();
  derive->add_option("factorisation", a.second_file)->required();
  derive->add_option("phases", a.third_file)->required();
  derive->add_option("--output", a.output);
  derive->callback(
      [&] { action = [&] { return cmd_cocycle_derive(a, out); }; });
  auto* check = cocycle->add_subcommand(
      "check", "exchange-identity residual of a unitary cocycle");
  check->add_option("skeleton", a.skeleton_file)->required();
  check->add_option("unitary", a.second_file)->required();
  check->add_option("--tol", a.check_tol, "pass threshold (default 1e-9)");
  check->add_option("--output", a.output);
  check->callback([&] { action = [&] { return cmd_cocycle_check(a, out); }; });

  auto* path = app.add_subcommand("path", "paths between unitary cocycles");
  path->require_subcommand(1);
  for (bool search : {false, true}) {
    auto* sub = path->add_subcommand(
        search ? "search" : "geodesic",
        search ? "optimise a discretised path through cocycles"
               : "blockwise one-parameter interpolation");
    sub->add_option("skeleton", a.skeleton_file)->required();
    sub->add_option("start", a.second_file)->required();
    sub->add_option("end", a.third_file)->required();
    sub->add_option("--samples", a.samples,
                    "number of intervals (default 64)");
    if (search)
      sub->add_option("--tol", a.search_tol,
                      "per-sample residual target (default 1e-8)");
    sub->add_option("--output", a.output);
    sub->callback(
        [&, search] { action = [&, search] { return cmd_path(search, a, out, err); }; });
  }

  auto* enumerate = app.add_subcommand(
      "enumerate", "stream every factorisation rule of a skeleton");
  enumerate->add_option("skeleton", a.skeleton_file)->required();
  enumerate->add_option("--limit", a.limit, "stop after this many rules");
  enumerate->add_flag("--count-only", a.count_only, "print only the count");
  enumerate->add_option("--output", a.output);
  enumerate->callback(
      [&] { action = [&] { return cmd_enumerate(a, out, err); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help and friends
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    return action();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace kocycle::cli
