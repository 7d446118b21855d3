#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "crosswidth/config.hpp"
#include "crosswidth/errors.hpp"
#include "crosswidth/format.hpp"
#include "crosswidth/oracle.hpp"
#include "crosswidth/semiclassics.hpp"

namespace cw::runner {

struct Flags {
  std::optional<double> h;
  std::vector<double> h_list;     // overrides the config sweep when non-empty
  std::optional<int> seed_index;  // absolute index into the Bohr-Sommerfeld grid
  int seed_offset = 0;            // compare: offset from the seed nearest E0
  std::optional<double> theta;
  std::optional<double> x;
  std::string variant = "one_switch";
  // stphase
  int m = 1;
  std::string phi;
  std::string sigma = "1";
  double a = -1.0, b = 1.0, x0 = 0.0;
};

struct Output {
  int exit_code = 0;
  std::string body;
  bool csv = false;
};

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNonConvergence = 3 };

int exit_code_for(const Error& e);

const std::vector<std::string>& subcommands();

// cfg may be null only for stphase.
Output run_subcommand(const std::string& name, const config::RunConfig* cfg, const Flags& flags);

struct CompareRow {
  double h = 0.0;
  int seed_index = 0;
  double seed = 0.0;
  std::complex<double> pseudo;
  double d = 0.0;
  double im_pred = 0.0;
  oracle::OracleResonance oracle;
  std::optional<double> vanish_margin;  // distance to the nearest vanishing energy / level spacing
  double ratio() const { return oracle.energy.imag() / im_pred; }
};

struct CompareResult {
  int m0 = 0;
  std::vector<CompareRow> rows;
  std::optional<oracle::ExponentFit> fit_oracle;
  std::optional<oracle::ExponentFit> fit_pred;
};

CompareResult compare(const config::RunConfig& cfg, const std::vector<double>& h_list, int seed_offset = 0,
                      const std::optional<double>& theta = {}, const std::optional<double>& x = {});

struct StphaseRow {
  double h = 0.0;
  std::complex<double> numeric, asym;
};

std::vector<StphaseRow> stphase(const Flags& flags, double calib, const std::vector<double>& h_list);

}  // namespace cw::runner
