#include "crosswidth/crosswidth.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "crosswidth/config.hpp"
#include "crosswidth/errors.hpp"
#include "crosswidth/geometry.hpp"
#include "crosswidth/quadrature.hpp"
#include "crosswidth/runner.hpp"
#include "crosswidth/semiclassics.hpp"

struct cw_session {
  cw::config::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cw_status record(const cw::Error& e) {
  g_last_error = e.what();
  return static_cast<cw_status>(cw::runner::exit_code_for(e));
}

template <class F>
cw_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const cw::Error& e) {
    return record(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CW_ERR_NUMERICAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CW_ERR_NUMERICAL;
  }
}

cw_status usage(const char* msg) {
  g_last_error = msg;
  return CW_ERR_USAGE;
}

}  // namespace

extern "C" {

const char* cw_version(void) { return "0.1.0"; }

const char* cw_last_error(void) { return g_last_error.c_str(); }

void cw_flags_init(cw_run_flags* f) {
  if (!f) return;
  std::memset(f, 0, sizeof *f);
  f->variant = "one_switch";
  f->m = 1;
  f->sigma = "1";
  f->a = -1.0;
  f->b = 1.0;
}

cw_status cw_session_from_file(const char* path, cw_session** out) {
  if (!path || !out) return usage("null argument");
  return guarded([&] {
    *out = new cw_session{cw::config::load_config(path)};
    return CW_OK;
  });
}

cw_status cw_session_from_string(const char* text, cw_session** out) {
  if (!text || !out) return usage("null argument");
  return guarded([&] {
    *out = new cw_session{cw::config::parse_config(text)};
    return CW_OK;
  });
}

void cw_session_free(cw_session* s) { delete s; }

cw_status cw_run(const cw_session* s, const char* subcommand, const cw_run_flags* flags, char** out, int* is_csv) {
  if (!subcommand || !out) return usage("null argument");
  *out = nullptr;
  return guarded([&] {
    cw::runner::Flags f;
    if (flags) {
      if (flags->has_h) f.h = flags->h;
      if (flags->h_list && flags->h_list_len) f.h_list.assign(flags->h_list, flags->h_list + flags->h_list_len);
      if (flags->has_seed_index) f.seed_index = flags->seed_index;
      f.seed_offset = flags->seed_offset;
      if (flags->has_theta) f.theta = flags->theta;
      if (flags->has_x) f.x = flags->x;
      if (flags->variant) f.variant = flags->variant;
      f.m = flags->m;
      if (flags->phi) f.phi = flags->phi;
      if (flags->sigma) f.sigma = flags->sigma;
      f.a = flags->a;
      f.b = flags->b;
      f.x0 = flags->x0;
    }
    const auto r = cw::runner::run_subcommand(subcommand, s ? &s->cfg : nullptr, f);
    *out = dup(r.body);
    if (is_csv) *is_csv = r.csv ? 1 : 0;
    if (r.exit_code != 0) g_last_error = r.body;
    return static_cast<cw_status>(r.exit_code);
  });
}

cw_status cw_action_loop(const cw_session* s, double energy, double* out) {
  if (!s || !out) return usage("null argument");
  return guarded([&] {
    *out = cw::quad::action_loop(s->cfg.problem, energy);
    return CW_OK;
  });
}

cw_status cw_width_coefficient(const cw_session* s, double energy, double h, int full, double* out) {
  if (!s || !out) return usage("null argument");
  return guarded([&] {
    const auto& p = s->cfg.problem;
    const auto report = cw::model::validate_structure(p);
    cw::model::require_valid(report);
    const auto g = cw::geometry::build_graph(p, report);
    cw::semi::AmplitudeOptions opts;
    opts.calib = s->cfg.calib;
    *out = cw::semi::width_coefficient(g, p, energy, h,
                                       full ? cw::semi::WidthVariant::Full : cw::semi::WidthVariant::OneSwitch, opts)
               .d;
    return CW_OK;
  });
}

void cw_string_free(char* s) { std::free(s); }

}  // extern "C"
