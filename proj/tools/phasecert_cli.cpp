// phasecert command line: certify, sweep, eig, verify.
// Exit codes: 0 certified / ok, 2 not certified / checks failed, 1 error or inapplicable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "phasecert/criteria.hpp"
#include "phasecert/report.hpp"
#include "phasecert/scenario.hpp"
#include "phasecert/verify.hpp"

namespace fs = std::filesystem;
using namespace phasecert;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNotCertified = 2;

struct RunArgs {
  std::string config;
  std::string frame;
  std::optional<double> wc_hz;
  std::string grid;
  std::string out_dir;
  std::string refine;
};

void add_run_flags(CLI::App* sub, RunArgs& a, bool with_frame) {
  sub->add_option("config,--config", a.config, "scenario file (TOML)")->required();
  if (with_frame) {
    sub->add_option("--frame", a.frame, "rectangular | power-polar | blended | naive-blended");
    sub->add_option("--wc", a.wc_hz, "blend cutoff in Hz");
    sub->add_option("--grid", a.grid, "fmin:fmax:points[:nozero], Hz");
    sub->add_option("--refine", a.refine, "on | off")->check(CLI::IsMember({"on", "off"}));
  }
  sub->add_option("--out-dir", a.out_dir, "output directory (else $PHASECERT_OUT_DIR, else the scenario's)");
}

fs::path resolve_out_dir(const RunArgs& a, const Scenario& sc) {
  if (!a.out_dir.empty()) return a.out_dir;
  if (const char* env = std::getenv("PHASECERT_OUT_DIR"); env && *env) return env;
  if (!sc.out_dir.empty()) return sc.out_dir;
  return fs::path("out") / sc.name;
}

CertifyOptions options_for(Scenario& sc, const RunArgs& a) {
  if (!a.frame.empty()) sc.frame.kind = parse_frame(a.frame);
  if (a.wc_hz) {
    if (!(*a.wc_hz > 0.0)) throw std::invalid_argument("--wc must be positive");
    sc.frame.wc = 2.0 * std::numbers::pi * *a.wc_hz;
  }
  if (!a.grid.empty()) sc.grid = parse_grid_option(a.grid);
  if (!a.refine.empty()) sc.refine = a.refine == "on";
  CertifyOptions opt;
  opt.frame = sc.frame;
  opt.grid = sc.grid.build();
  opt.refine = sc.refine;
  opt.centralized = sc.centralized;
  return opt;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <class F>
std::string capture(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

// Scenario load and assembly with distinct diagnostics.
std::optional<std::pair<Scenario, System>> prepare(const RunArgs& a) {
  Scenario sc;
  try {
    sc = load_scenario(a.config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return std::nullopt;
  }
  try {
    System sys = assemble(sc);
    return std::make_pair(std::move(sc), std::move(sys));
  } catch (const std::exception& e) {
    std::cerr << "assembly error: " << a.config << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

int run_certify(const RunArgs& a, bool sweep_only) {
  auto prep = prepare(a);
  if (!prep) return kError;
  auto& [sc, sys] = *prep;
  CertifyOptions opt;
  try {
    opt = options_for(sc, a);
  } catch (const std::exception& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kError;
  }
  const CertificateReport rep = certify(sys, opt);
  const fs::path out = resolve_out_dir(a, sc);
  write_file(out / "sweep.csv", capture([&](std::ostream& os) { write_sweep_csv(os, sc, sys, rep); }));
  if (sweep_only) {
    write_file(out / "loop_eig.csv", capture([&](std::ostream& os) { write_loop_eig_csv(os, sc, sys, opt, rep); }));
    std::cout << sc.name << ": " << rep.verdicts.size() << " frequencies in frame " << to_string(opt.frame.kind)
              << " -> " << (out / "sweep.csv").string() << "\n";
    return kOk;
  }
  write_file(out / "report.json", report_json(sc, sys, opt, rep));

  std::cout << sc.name << " [" << to_string(opt.frame.kind) << "]: " << rep.conclusion() << "\n";
  if (!rep.failing_hz.empty()) {
    std::cout << "  violated at " << rep.failing_hz.size() << " frequencies in [" << rep.failing_hz.front() << ", "
              << rep.failing_hz.back() << "] Hz";
    if (rep.limiting_converter >= 0)
      std::cout << "; limiting converter at bus " << rep.limiting_converter << " (" << rep.limiting_hz << " Hz)";
    std::cout << "\n";
  }
  std::cout << "  report: " << (out / "report.json").string() << "\n";
  if (!rep.applicable) {
    std::cerr << "inapplicable: " << rep.reason << "\n";
    return kError;
  }
  return rep.certified ? kOk : kNotCertified;
}

int run_eig(const RunArgs& a) {
  auto prep = prepare(a);
  if (!prep) return kError;
  auto& [sc, sys] = *prep;
  const GroundTruth gt = ground_truth(sys);
  const fs::path out = resolve_out_dir(a, sc);
  write_file(out / "eig.csv", capture([&](std::ostream& os) { write_eig_csv(os, sc, gt); }));
  std::cout << sc.name << ": " << gt.eigenvalues.size() << " modes, " << (gt.stable ? "stable" : "unstable")
            << ", rightmost " << gt.dominant.real() << (gt.dominant.imag() < 0 ? " - " : " + ")
            << std::abs(gt.dominant.imag()) << "j (" << gt.dominant_hz << " Hz)\n";
  std::cout << "  eigenvalues: " << (out / "eig.csv").string() << "\n";
  return kOk;
}

int run_verify_cmd(std::uint64_t seed, int trials) {
  VerifyOptions opt;
  opt.seed = seed;
  opt.trials = trials;
  bool all = true;
  for (const auto& s : run_verify(opt)) {
    std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << ": " << s.trials << " trials, " << s.failures
              << " failures, worst " << s.worst << " (tolerance " << s.tolerance << "), " << s.seconds << " s";
    if (!s.passed()) std::cout << "; first: " << s.detail;
    std::cout << "\n";
    all = all && s.passed();
  }
  return all ? kOk : kNotCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain stability certificates for grid-forming converter networks"};
  app.require_subcommand(1);

  RunArgs certify_args, sweep_args, eig_args;
  auto* certify_cmd = app.add_subcommand("certify", "run the decentralized certificate, write report.json and sweep.csv");
  add_run_flags(certify_cmd, certify_args, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "write gain and phase profiles to sweep.csv");
  add_run_flags(sweep_cmd, sweep_args, true);
  auto* eig_cmd = app.add_subcommand("eig", "closed-loop spectrum to eig.csv");
  add_run_flags(eig_cmd, eig_args, false);

  std::uint64_t seed = kDefaultSeed;
  int trials = 0;
  auto* verify_cmd = app.add_subcommand("verify", "randomized property suites");
  verify_cmd->add_option("--seed", seed, "random seed");
  verify_cmd->add_option("--trials", trials, "trials per suite (0 keeps the defaults)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (certify_cmd->parsed()) return run_certify(certify_args, false);
    if (sweep_cmd->parsed()) return run_certify(sweep_args, true);
    if (eig_cmd->parsed()) return run_eig(eig_args);
    if (verify_cmd->parsed()) return run_verify_cmd(seed, trials);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
