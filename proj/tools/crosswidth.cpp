#include <crosswidth/crosswidth.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<double> h;
  std::vector<double> h_list;
  std::optional<int> seed_index;
  int seed_offset = 0;
  std::optional<double> theta, x;
  std::string variant = "one_switch";
  int m = 1;
  std::string phi, sigma = "1";
  double a = -1.0, b = 1.0, x0 = 0.0;
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical resonance widths for 2x2 systems with crossing trajectories"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", cw_version());
  Options o;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("config", o.config, "run configuration file");
    if (config_required) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "write the output to this file instead of stdout");
    sub->add_option("--h-list", o.h_list, "comma-separated h values (overrides [sweep] h_list)")->delimiter(',');
  };
  auto with_h = [&](CLI::App* sub) { sub->add_option("--h", o.h, "semiclassical parameter"); };

  auto* analyze = app.add_subcommand("analyze", "structure report and trajectory graph (JSON)");
  common(analyze, true);
  auto* bs = app.add_subcommand("bs", "Bohr-Sommerfeld grid in the box (CSV)");
  common(bs, true);
  with_h(bs);
  auto* pseudo = app.add_subcommand("pseudo", "pseudo-resonances and argument-principle count (JSON)");
  common(pseudo, true);
  with_h(pseudo);
  auto* widths = app.add_subcommand("widths", "width coefficients and predicted Im (JSON)");
  common(widths, true);
  with_h(widths);
  widths->add_option("--variant", o.variant, "one_switch or full")->check(CLI::IsMember({"one_switch", "full"}));
  auto* oracle = app.add_subcommand("oracle", "complex-scaling shooting resonance (JSON)");
  common(oracle, true);
  with_h(oracle);
  oracle->add_option("--seed-index", o.seed_index, "index into the Bohr-Sommerfeld grid (default: nearest E0)");
  oracle->add_option("--theta", o.theta, "scaling angle");
  oracle->add_option("--X", o.x, "contour truncation");
  auto* compare = app.add_subcommand("compare", "oracle vs prediction over the h sweep, with exponent fits (CSV)");
  common(compare, true);
  compare->add_option("--seed-offset", o.seed_offset, "grid offset from the seed nearest E0");
  compare->add_option("--theta", o.theta, "scaling angle");
  compare->add_option("--X", o.x, "contour truncation");
  auto* stphase = app.add_subcommand("stphase", "oscillatory integral vs stationary-phase term (CSV)");
  common(stphase, false);
  stphase->add_option("--m", o.m, "order of the stationary point")->check(CLI::PositiveNumber);
  stphase->add_option("--phi", o.phi, "phase expression in x")->required();
  stphase->add_option("--sigma", o.sigma, "amplitude expression in x");
  stphase->add_option("--a", o.a, "left end of the interval");
  stphase->add_option("--b", o.b, "right end of the interval");
  stphase->add_option("--x0", o.x0, "stationary point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : CW_ERR_USAGE;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  cw_session* session = nullptr;
  if (!o.config.empty()) {
    if (cw_status st = cw_session_from_file(o.config.c_str(), &session); st != CW_OK) {
      std::cerr << "crosswidth: " << cw_last_error() << '\n';
      return st;
    }
  }

  cw_run_flags f;
  cw_flags_init(&f);
  if (o.h) {
    f.has_h = 1;
    f.h = *o.h;
  }
  f.h_list = o.h_list.data();
  f.h_list_len = o.h_list.size();
  if (o.seed_index) {
    f.has_seed_index = 1;
    f.seed_index = *o.seed_index;
  }
  f.seed_offset = o.seed_offset;
  if (o.theta) {
    f.has_theta = 1;
    f.theta = *o.theta;
  }
  if (o.x) {
    f.has_x = 1;
    f.x = *o.x;
  }
  f.variant = o.variant.c_str();
  f.m = o.m;
  f.phi = o.phi.c_str();
  f.sigma = o.sigma.c_str();
  f.a = o.a;
  f.b = o.b;
  f.x0 = o.x0;

  char* body = nullptr;
  const cw_status st = cw_run(session, name.c_str(), &f, &body, nullptr);
  cw_session_free(session);
  if (body) {
    if (o.out.empty()) {
      std::fputs(body, stdout);
    } else {
      std::ofstream file(o.out, std::ios::binary);
      file << body;
      if (!file) {
        std::cerr << "crosswidth: cannot write '" << o.out << "'\n";
        cw_string_free(body);
        return CW_ERR_USAGE;
      }
    }
    cw_string_free(body);
  }
  if (st != CW_OK) std::cerr << "crosswidth: " << name << " failed with status " << st << '\n';
  return st;
}
