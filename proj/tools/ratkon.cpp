// Command-line driver: identity checks, series expansion, Gaussian
// integration, hair expansion and complete contraction over JSON streams.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ratkon/verify.hpp"

namespace {

std::string read_stream(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path);
  if (!f) throw ratkon::error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_stream(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw ratkon::error("cannot open output file: " + path);
  f << text << "\n";
}

void print_report(const ratkon::checks::Report& r) {
  std::printf("%-24s %s  %7.2fs  %s\n", r.identity.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
              r.params.c_str());
  if (!r.pass) std::printf("%-24s witness: %s\n", "", r.witness.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact diagrammatic calculus toolkit"};
  app.require_subcommand(1);

  // --- verify ---------------------------------------------------------
  ratkon::checks::Options opt;
  std::string identity;
  bool list_only = false;
  auto* verify = app.add_subcommand("verify", "run a named identity check (or 'all')");
  verify->add_option("identity", identity, "identity name, or 'all'");
  verify->add_flag("--list", list_only, "list the registered identities and exit");
  verify->add_option("--g", opt.g, "free-group rank for random inputs")->capture_default_str();
  verify->add_option("--degree", opt.degree, "truncation override (-1: per-check default)");
  verify->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  verify->add_option("--cases", opt.cases, "case-count override (-1: per-check default)");
  verify->add_option("--site", opt.site, "generator site for conjugation checks")
      ->capture_default_str();
  verify->add_option("--matrix", opt.matrix, "matrix override, e.g. \"[[2-t1]]\" or \"wrap2\"");
  verify->add_option("--threads", opt.threads, "worker threads (0: use RATKON_THREADS)");

  // --- expand ----------------------------------------------------------
  std::string expr;
  int expand_degree = 6;
  bool expand_json = false;
  auto* expand = app.add_subcommand("expand", "expand a localized element into its series");
  expand->add_option("expression", expr, "element expression, e.g. \"(2 - t1)^-1\"")->required();
  expand->add_option("--degree", expand_degree, "truncation degree")->capture_default_str();
  expand->add_flag("--json", expand_json, "emit JSON instead of plain text");

  // --- integrate -------------------------------------------------------
  std::string in_path = "-", out_path = "-";
  auto* integrate_cmd = app.add_subcommand("integrate", "integrate a JSON integrand");
  integrate_cmd->add_option("--in", in_path, "input file (default: stdin)");
  integrate_cmd->add_option("--out", out_path, "output file (default: stdout)");

  // --- hair ------------------------------------------------------------
  int hair_budget = 4;
  int hair_g = 0;
  std::string hair_matrix, nu_path;
  auto* hair_cmd = app.add_subcommand("hair", "expand beads of a JSON diagram sum into hair legs");
  hair_cmd->add_option("--in", in_path, "input file (default: stdin)");
  hair_cmd->add_option("--out", out_path, "output file (default: stdout)");
  hair_cmd->add_option("--degree", hair_budget, "shared new-leg budget per diagram")
      ->capture_default_str();
  hair_cmd->add_option("--matrix", hair_matrix,
                       "covariance matrix: prepends the wheel factor exp(-1/2 wheels(chi(M)))");
  hair_cmd->add_option("--nu", nu_path, "JSON diagram sum for the nu factor (default: 1)");
  hair_cmd->add_option("--g", hair_g, "number of recolored nu copies to append (default: auto)");

  // --- contract --------------------------------------------------------
  int contract_degree = 2;
  auto* contract_cmd =
      app.add_subcommand("contract", "completely contract a JSON linking specification");
  contract_cmd->add_option("--in", in_path, "input file (default: stdin)");
  contract_cmd->add_option("--out", out_path, "output file (default: stdout)");
  contract_cmd->add_option("--degree", contract_degree, "degree cap of the result")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      if (list_only) {
        for (auto& info : ratkon::checks::registry())
          std::printf("%-24s %s\n", info.name.c_str(), info.summary.c_str());
        return 0;
      }
      if (identity.empty()) {
        std::fprintf(stderr, "verify: an identity name (or 'all') is required\n");
        return 1;
      }
      bool ok = true;
      if (identity == "all") {
        for (auto& info : ratkon::checks::registry()) {
          ratkon::checks::Report r = ratkon::checks::run_identity(info, opt);
          print_report(r);
          ok = ok && r.pass;
        }
      } else {
        const auto* info = ratkon::checks::find_identity(identity);
        if (!info) {
          std::fprintf(stderr, "unknown identity '%s'; available:\n", identity.c_str());
          for (auto& i : ratkon::checks::registry())
            std::fprintf(stderr, "  %s\n", i.name.c_str());
          return 1;
        }
        ratkon::checks::Report r = ratkon::checks::run_identity(*info, opt);
        print_report(r);
        ok = r.pass;
      }
      return ok ? 0 : 1;
    }

    if (*expand) {
      ratkon::LocElement x = ratkon::parse_loc(expr);
      ratkon::NCSeries s = ratkon::magnus_expand(x, static_cast<unsigned>(expand_degree));
      if (expand_json)
        write_stream(out_path, ratkon::ncseries_json(s).dump(2));
      else
        write_stream(out_path, s.str());
      return 0;
    }

    if (*integrate_cmd) {
      auto j = ratkon::json::parse(read_stream(in_path));
      ratkon::Integrand I = ratkon::json_integrand(j);
      ratkon::DiagramSum r = ratkon::integrate(I);
      write_stream(out_path, ratkon::diagramsum_json(r).dump(2));
      return 0;
    }

    if (*hair_cmd) {
      auto j = ratkon::json::parse(read_stream(in_path));
      ratkon::DiagramSum s = ratkon::json_diagramsum(j);
      if (hair_matrix.empty() && nu_path.empty()) {
        ratkon::DiagramSum r = ratkon::hair(s, static_cast<unsigned>(hair_budget));
        write_stream(out_path, ratkon::diagramsum_json(r).dump(2));
        return 0;
      }
      ratkon::LocMatrix M;
      if (!hair_matrix.empty()) M = ratkon::checks::parse_matrix(hair_matrix);
      ratkon::DiagramSum nu = ratkon::DiagramSum::unit(s.cap());
      std::string nu_source = "DEFAULT: nu = 1 (unit diagram sum); pass --nu to supply one";
      if (!nu_path.empty()) {
        nu = ratkon::json_diagramsum(ratkon::json::parse(read_stream(nu_path)));
        nu_source = "user-supplied";
      }
      int copies = hair_g;
      if (copies <= 0) {
        copies = 1;
        for (auto& e : M.a) copies = std::max(copies, e.g());
      }
      ratkon::DiagramSum r =
          ratkon::hair_nu(M, s, nu, static_cast<unsigned>(hair_budget), copies);
      ratkon::json out{{"nu", nu_source}, {"sum", ratkon::diagramsum_json(r)}};
      write_stream(out_path, out.dump(2));
      return 0;
    }

    if (*contract_cmd) {
      auto j = ratkon::json::parse(read_stream(in_path));
      ratkon::ClasperSpec spec = ratkon::json_clasper(j);
      ratkon::DiagramSum r =
          ratkon::complete_contraction(spec, static_cast<unsigned>(contract_degree));
      write_stream(out_path, ratkon::diagramsum_json(r).dump(2));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
