// dsmkit command-line tool. Exit codes: 0 success, 1 usage/IO/validation
// error, 2 mathematically infeasible.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dsmkit.hpp"
#include "dsmkit/documents.hpp"
#include "dsmkit/io.hpp"

namespace {

using namespace dsmkit;
using io::json;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

struct Options {
  ToleranceConfig tol;

  // map solve
  std::string family, x, y, z, w;

  // pencil gen / validate
  long long n = 4, m = 2, rank_r = -1;
  std::string out, file;

  // backerr
  std::string pencil, lambda, lambdas, blocks = "JREB", variant = "sd", u, csv;
  std::optional<std::uint64_t> seed;

  // verify
  std::string result;
};

void emit(const json& j) { std::cout << io::dump(j); }

cmat load_matrix(const std::string& path, const std::string& name) {
  return io::matrix_from_json(io::read_json_file(path), name + " (" + path + ")");
}

std::uint64_t seed_or_default(const Options& o) { return o.seed.value_or(0); }

int run_map_solve(const Options& o) {
  const auto fam = parse_family(o.family);
  if (!fam) throw io::FormatError("unknown family '" + o.family + "'");
  if (o.z.empty() != o.w.empty()) throw io::FormatError("--z and --w must be given together");
  const cmat X = load_matrix(o.x, "x");
  const cmat Y = load_matrix(o.y, "y");
  std::optional<cmat> Z, W;
  if (!o.z.empty()) {
    Z = load_matrix(o.z, "z");
    W = load_matrix(o.w, "w");
  }
  io::ResultDocument d = io::solve_map_document(*fam, X, Y, Z, W, o.tol);
  d.seed = o.seed;
  emit(io::result_to_json(d));
  if (!d.feasible) std::cerr << "dsmkit: infeasible: " << d.reason << "\n";
  return d.feasible ? kOk : kInfeasible;
}

int run_pencil_gen(const Options& o) {
  if (o.n < 1 || o.m < 1) throw io::FormatError("--n and --m must be at least 1");
  const PHPencil P = gen_pencil(o.n, o.m, seed_or_default(o), o.rank_r);
  const std::string text = io::dump(io::pencil_to_json(P));
  if (o.out.empty())
    std::cout << text;
  else
    io::write_text_file(o.out, text);
  return kOk;
}

int run_pencil_validate(const Options& o) {
  const PHPencil P = io::pencil_from_json_unchecked(io::read_json_file(o.file), o.file);
  bool all = true;
  for (const auto& c : P.check(o.tol)) {
    std::cout << c.name << ": " << (c.held ? "pass" : "FAIL") << "\n";
    all = all && c.held;
  }
  return all ? kOk : kError;
}

int run_backerr(const Options& o) {
  if (o.pencil.empty()) throw io::FormatError("--pencil is required");
  const PHPencil P = io::pencil_from_json(io::read_json_file(o.pencil), o.tol, o.pencil);
  const BlockSelection blocks = BlockSelection::parse(o.blocks);
  const Variant variant = parse_variant(o.variant);
  EigenPair ep;
  if (!o.u.empty()) {
    if (o.lambda.empty()) throw io::FormatError("--lambda is required with --u");
    const cvec u = io::vector_from_json(io::read_json_file(o.u), "u (" + o.u + ")");
    ep = EigenPair::from_u(io::parse_lambda(o.lambda), u, P.n(), P.m());
  } else {
    ep = gen_eigpair(P, seed_or_default(o), blocks, variant, o.tol);
    if (!o.lambda.empty()) ep.lambda = io::parse_lambda(o.lambda);
  }
  io::BackerrDocument d = io::solve_backerr_document(P, ep, blocks, variant, o.tol);
  d.seed = o.u.empty() ? std::optional<std::uint64_t>(seed_or_default(o)) : o.seed;
  emit(io::backerr_to_json(d));
  return d.bounds.finite ? kOk : kInfeasible;
}

int run_backerr_sweep(const Options& o) {
  const std::vector<cplx> lambdas = io::parse_lambda_list(o.lambdas);
  const PHPencil P = o.pencil.empty()
                         ? gen_pencil(o.n, o.m, seed_or_default(o), o.rank_r)
                         : io::pencil_from_json(io::read_json_file(o.pencil), o.tol, o.pencil);
  const auto rows = experiment_table(P, lambdas, seed_or_default(o), BlockSelection::parse(o.blocks),
                                     parse_variant(o.variant), o.tol);
  const std::string text = io::experiment_csv(rows);
  if (o.csv.empty())
    std::cout << text;
  else
    io::write_text_file(o.csv, text);
  return kOk;
}

int run_verify(const Options& o) {
  const json j = io::read_json_file(o.result);
  const std::string kind = io::string_field(j, "kind", o.result);
  io::VerifyReport r;
  if (kind == "backerr")
    r = io::verify_backerr_document(io::backerr_from_json(j, o.tol), o.tol);
  else
    r = io::verify_document(io::result_from_json(j), o.tol);
  json out = {{"pass", r.pass}, {"checks", io::conditions_to_json(r.checks)}};
  if (r.oracle_norm) out["oracle_norm"] = *r.oracle_norm;
  emit(out);
  return r.pass ? kOk : kError;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Doubly structured mappings and structured eigenpair backward errors"};
  app.set_version_flag("--version", dsmkit::kVersion);
  app.require_subcommand(1);
  app.add_option("--tol-rank", o.tol.rank_tol, "relative rank cut")->capture_default_str();
  app.add_option("--tol-psd", o.tol.psd_tol, "relative eigenvalue band for semidefiniteness")
      ->capture_default_str();
  app.add_option("--tol-residual", o.tol.residual_tol, "relative residual tolerance")
      ->capture_default_str();
  app.add_option("--tol-colinearity", o.tol.colinearity_tol, "relative colinearity tolerance")
      ->capture_default_str();

  auto* map = app.add_subcommand("map", "single and doubly structured mappings");
  map->require_subcommand(1);
  auto* solve = map->add_subcommand("solve", "minimal-norm mapping; prints a result document");
  solve->add_option("--family", o.family, "structure family of the (leading) block")->required();
  solve->add_option("--x", o.x, "x as a matrix file")->required();
  solve->add_option("--y", o.y, "y as a matrix file")->required();
  solve->add_option("--z", o.z, "z as a matrix file");
  solve->add_option("--w", o.w, "w as a matrix file");
  solve->add_option("--seed", o.seed, "seed echoed into the result")->envname("DSMKIT_SEED");

  auto* pencil = app.add_subcommand("pencil", "port-Hamiltonian pencils");
  pencil->require_subcommand(1);
  auto* gen = pencil->add_subcommand("gen", "random pencil");
  gen->add_option("--n", o.n, "state dimension")->required();
  gen->add_option("--m", o.m, "input dimension")->required();
  gen->add_option("--seed", o.seed, "generator seed")->envname("DSMKIT_SEED");
  gen->add_option("--rank-r", o.rank_r, "rank of R (default full)");
  gen->add_option("-o,--out", o.out, "output file (default stdout)");
  auto* validate = pencil->add_subcommand("validate", "check pencil invariants");
  validate->add_option("file", o.file, "pencil file")->required();

  auto* backerr = app.add_subcommand("backerr", "structured eigenpair backward error");
  backerr->add_option("--pencil", o.pencil, "pencil file");
  backerr->add_option("--lambda", o.lambda, "purely imaginary eigenvalue, e.g. 0.5i");
  backerr->add_option("--blocks", o.blocks, "perturbed blocks, e.g. JREB")->capture_default_str();
  backerr->add_option("--variant", o.variant, "s or sd")->capture_default_str();
  auto* u_opt = backerr->add_option("--u", o.u, "eigenvector file (length 2n+m)");
  backerr->add_option("--seed", o.seed, "seed for a generated admissible eigenpair")
      ->envname("DSMKIT_SEED")
      ->excludes(u_opt);
  auto* sweep = backerr->add_subcommand("sweep", "bounds over a list of eigenvalues");
  sweep->add_option("--lambdas", o.lambdas, "comma-separated list, e.g. 0.5i,1i,2i")->required();
  sweep->add_option("--pencil", o.pencil, "pencil file (default: generated from --n, --m, --seed)");
  sweep->add_option("--n", o.n, "generated pencil state dimension")->capture_default_str();
  sweep->add_option("--m", o.m, "generated pencil input dimension")->capture_default_str();
  sweep->add_option("--rank-r", o.rank_r, "rank of R for the generated pencil");
  sweep->add_option("--blocks", o.blocks, "perturbed blocks")->capture_default_str();
  sweep->add_option("--variant", o.variant, "s or sd")->capture_default_str();
  sweep->add_option("--seed", o.seed, "pencil and eigenvector seed")->envname("DSMKIT_SEED");
  sweep->add_option("--csv", o.csv, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "re-audit a result document");
  verify->add_option("--result", o.result, "result document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    o.tol.validate();
    if (solve->parsed()) return run_map_solve(o);
    if (gen->parsed()) return run_pencil_gen(o);
    if (validate->parsed()) return run_pencil_validate(o);
    if (sweep->parsed()) return run_backerr_sweep(o);
    if (backerr->parsed()) return run_backerr(o);
    if (verify->parsed()) return run_verify(o);
  } catch (const std::exception& e) {
    std::cerr << "dsmkit: error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
