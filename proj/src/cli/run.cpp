#include "finsler/cli/run.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "finsler/cli/examples.hpp"
#include "finsler/core/geometry.hpp"
#include "finsler/core/serialize.hpp"
#include "finsler/nullity/report.hpp"
#include "finsler/oracle/fd.hpp"
#include "parallel.hpp"

namespace finsler::cli {

using nlohmann::ordered_json;
using nullity::Which;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string point_text(const ChartPoint& p) {
  std::string s = "x=(";
  for (std::size_t i = 0; i < p.x.size(); ++i) s += (i ? "," : "") + short_num(p.x[i]);
  s += ") y=(";
  for (std::size_t i = 0; i < p.y.size(); ++i) s += (i ? "," : "") + short_num(p.y[i]);
  return s + ")";
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["energy"] = c.energy;
  j["dim"] = c.dim;
  j["points"] = c.points;
  j["samples"] = c.samples;
  j["box"] = c.box;
  j["constraints"] = c.constraints;
  j["tol"] = c.tol;
  j["kernel_tol"] = c.kernel_tol;
  j["seed"] = c.seed;
  j["checks"] = c.checks;
  j["deep_checks"] = c.deep;
  j["fields"] = c.fields;
  j["format"] = c.format;
  return j;
}

ordered_json envelope(const RunConfig& c) {
  ordered_json j;
  j["tool"] = "nullity-lab";
  j["tool_version"] = kToolVersion;
  j["command"] = c.command;
  if (c.command == "example") j["example"] = c.example_id;
  j["config"] = config_json(c);
  j["convention_ledger"] = convention_ledger();
  return j;
}

Which which_of(const std::string& check) { return nullity::parse_which(check.substr(8)); }

struct Collected {
  ordered_json results = ordered_json::object();
  std::ostringstream text;
  std::ostringstream csv;
  bool failed = false;
};

nullity::SuiteReport run_identities(const Resolved& r, bool deep, Collected& c) {
  auto s = nullity::verify_identities(r.energy, r.points, r.raw.tol, deep, r.raw.kernel_tol);
  c.results["identities"] = nullity::to_json(s);
  c.failed = c.failed || !s.all_pass;
  c.text << "identities (" << s.points << " points, tol " << short_num(s.tolerance) << (deep ? ", deep" : "") << "):\n";
  for (const auto& x : s.results) {
    std::string st = x.skipped ? "skip" : x.observation ? "obs " : x.pass ? "pass" : "FAIL";
    c.text << "  [" << st << "] " << x.name << "  max residual " << short_num(x.max_residual);
    if (!x.note.empty()) c.text << "  (" << x.note << ")";
    c.text << "\n";
  }
  c.text << "  " << (s.all_pass ? "all pass" : "FAILURES") << "\n";
  return s;
}

std::string identities_csv(const nullity::SuiteReport& s) {
  std::ostringstream os;
  os << "name,status,max_residual,threshold,worst_point,points\n";
  for (const auto& x : s.results) {
    std::string st = x.skipped ? "skipped" : x.observation ? "observation" : x.pass ? "pass" : "fail";
    os << x.name << ',' << st << ',' << num(x.max_residual) << ',' << num(x.threshold) << ',' << x.worst_point << ','
       << x.points << '\n';
  }
  return os.str();
}

std::vector<nullity::NullityReport> run_nullity(const Resolved& r, const std::vector<Which>& ws, bool integrability,
                                                Collected& c) {
  std::vector<nullity::NullityReport> all;
  auto bundles = detail::parallel_map(r.points, [&](const ChartPoint& z) { return compute_geometry(r.energy, z); });
  ordered_json nj;
  for (Which w : ws) {
    std::string wn = nullity::to_string(w);
    ordered_json arr = ordered_json::array();
    c.text << "nullity of " << wn << ":\n";
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      auto rep = nullity::nullity_space(bundles[i], w, r.raw.kernel_tol);
      arr.push_back(nullity::to_json(rep));
      c.text << "  point " << i << " " << point_text(r.points[i]) << ": mu = " << rep.mu;
      if (!rep.warning.empty()) c.text << "  (" << rep.warning << ")";
      c.text << "\n";
      for (const auto& b : rep.basis) {
        c.text << "    basis (";
        for (std::size_t k = 0; k < b.size(); ++k) c.text << (k ? ", " : "") << short_num(b[k]);
        c.text << ")\n";
      }
      all.push_back(rep);
    }
    ordered_json entry;
    entry["kernels"] = arr;
    if (integrability) {
      try {
        nullity::IntegrabilityReport ir;
        if (r.fields.empty()) {
          ir = nullity::integrability_check(r.energy, w, r.points, r.raw.kernel_tol);
        } else {
          std::vector<std::pair<std::string, dsl::FieldSpec>> fs;
          for (const auto& f : r.fields) fs.emplace_back(f.name, f.spec);
          ir = nullity::integrability_check(r.energy, w, r.points, fs, r.raw.kernel_tol);
        }
        entry["integrability"] = nullity::to_json(ir);
        c.text << "  integrability (" << ir.frame_kind << " frame): " << ir.verdict
               << (ir.criterion_consistent ? "" : "  [criterion disagrees with the brackets]")
               << (ir.fields_in_distribution ? "" : "  [some fields leave the distribution]") << "\n";
      } catch (const std::exception& e) {
        entry["integrability"] = {{"status", "skipped"}, {"reason", e.what()}};
        c.text << "  integrability skipped: " << e.what() << "\n";
      }
    }
    nj[wn] = entry;
  }
  c.results["nullity"] = nj;
  return all;
}

void run_brackets(const Resolved& r, Collected& c) {
  if (r.fields.size() < 2) throw ConfigError("bracket needs at least two --field entries");
  const int n = r.energy.dim();
  ordered_json arr = ordered_json::array();
  c.csv << "point,a,b,component,jet,fd\n";
  c.text << "brackets (frame split; fd error over coordinate components):\n";
  double worst = 0;
  for (std::size_t a = 0; a < r.fields.size(); ++a)
    for (std::size_t b = a + 1; b < r.fields.size(); ++b) {
      const auto& A = r.fields[a];
      const auto& B = r.fields[b];
      auto res = detail::parallel_map(r.points, [&](const ChartPoint& z) {
        return std::make_pair(nullity::lie_bracket(r.energy, A.spec, B.spec, z, r.raw.tol),
                              oracle::fd_bracket(r.energy, A.spec, B.spec, z));
      });
      for (std::size_t p = 0; p < res.size(); ++p) {
        const auto& [jet, fd] = res[p];
        double diff = 0, scale = 1e-8;
        for (int k = 0; k < 2 * n; ++k) {
          diff = std::max(diff, std::abs(jet.coordinate[k] - fd[k]));
          scale = std::max(scale, std::abs(fd[k]));
          c.csv << p << ',' << A.name << ',' << B.name << ',' << k << ',' << num(jet.coordinate[k]) << ','
                << num(fd[k]) << '\n';
        }
        double rel = diff / scale;
        worst = std::max(worst, rel);
        auto j = nullity::to_json(jet);
        j["a"] = A.name;
        j["b"] = B.name;
        j["point"] = p;
        j["fd_coordinate"] = fd;
        j["fd_rel_error"] = rel;
        arr.push_back(j);
        c.text << "  [" << A.name << ", " << B.name << "] at point " << p << ": "
               << (jet.is_horizontal ? "horizontal" : "not horizontal") << ", vertical (";
        for (int k = 0; k < n; ++k) c.text << (k ? ", " : "") << short_num(jet.vertical[k]);
        c.text << "), fd rel err " << short_num(rel) << "\n";
      }
    }
  bool ok = worst < 1e-5;
  c.failed = c.failed || !ok;
  c.results["brackets"] = {{"pairs", arr}, {"max_fd_rel_error", worst}, {"threshold", 1e-5}, {"pass", ok}};
}

nullity::ClassificationReport run_classify(const Resolved& r, Collected& c) {
  auto cr = nullity::classify_space(r.energy, r.points, r.raw.tol);
  c.results["classification"] = nullity::to_json(cr);
  c.failed = c.failed || !cr.inconsistencies.empty();
  c.text << "classification (" << r.points.size() << " points):\n";
  for (const auto& p : cr.properties) {
    c.text << "  " << p.name << ": " << (p.holds ? "yes" : "no") << "  residual " << short_num(p.residual);
    if (p.fit) c.text << "  fit " << short_num(*p.fit);
    c.text << "\n";
  }
  for (const auto& s : cr.inconsistencies) c.text << "  INCONSISTENT: " << s << "\n";
  return cr;
}

std::string classify_csv(const nullity::ClassificationReport& cr) {
  std::ostringstream os;
  os << "property,residual,holds,sample_count,fit\n";
  for (const auto& p : cr.properties)
    os << p.name << ',' << num(p.residual) << ',' << (p.holds ? "true" : "false") << ',' << p.sample_count << ','
       << (p.fit ? num(*p.fit) : "") << '\n';
  return os.str();
}

std::string ledger_csv(const ExampleReport& rep) {
  std::ostringstream os;
  os << "example,table,entry,point,printed,computed,oracle,rel_error,match\n";
  for (const auto& L : rep.tables)
    for (const auto& e : L.entries)
      for (std::size_t p = 0; p < e.printed.size(); ++p)
        os << rep.id << ',' << L.table.name << ',' << e.entry.label << ',' << p << ',' << num(e.printed[p]) << ','
           << num(e.computed[p]) << ',' << num(e.oracle[p]) << ',' << num(rel_error(e.printed[p], e.computed[p]))
           << ',' << (e.match ? "true" : "false") << '\n';
  return os.str();
}

std::string finish_json(ordered_json j, int code) {
  j["status"] = code == kExitOk ? "pass" : "fail";
  j["exit_code"] = code;
  return j.dump(2) + "\n";
}

}  // namespace

Outcome execute(const RunConfig& cfg) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return "elapsed " + short_num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
           " s\n";
  };
  if (cfg.format != "text" && cfg.format != "json" && cfg.format != "csv")
    throw ConfigError("format must be text, json or csv");

  if (cfg.command == "example") {
    if (cfg.example_id < 1 || cfg.example_id > 3) throw ConfigError("example id must be 1, 2 or 3");
    auto rep = run_example(cfg.example_id, cfg.seed, cfg.tol, cfg.kernel_tol);
    o.exit_code = rep.pass ? kExitOk : kExitCheckFailed;
    if (cfg.format == "json") {
      auto j = envelope(cfg);
      j["results"] = rep.body;
      j["errata"] = rep.body["errata"];
      o.report = finish_json(j, o.exit_code);
    } else if (cfg.format == "csv") {
      o.report = ledger_csv(rep);
    } else {
      o.report = rep.text + elapsed();
    }
    return o;
  }

  Resolved r = resolve(cfg);
  Collected c;
  const auto& ch = r.checks;
  auto has = [&](const std::string& s) { return std::find(ch.begin(), ch.end(), s) != ch.end(); };
  std::vector<Which> ws;
  for (const auto& s : ch)
    if (s.rfind("nullity:", 0) == 0) ws.push_back(which_of(s));
  const bool deep = cfg.deep || has("deep-checks");
  std::string csv;
  c.text << "nullity-lab " << cfg.command << ": E = " << cfg.energy << " (n = " << cfg.dim << "), " << r.points.size()
         << " points\n";
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points) pts.push_back(finsler::to_json(p));

  if (cfg.command == "analyze") {
    bool defaults = ch.empty();
    if (defaults) ws = {Which::Barthel, Which::R, Which::P, Which::Q};
    auto bundles = detail::parallel_map(r.points, [&](const ChartPoint& z) { return compute_geometry(r.energy, z); });
    ordered_json geo = ordered_json::array();
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      const auto& b = bundles[i];
      ordered_json g;
      g["point"] = finsler::to_json(b.point);
      g["energy"] = b.energy;
      g["cond_g"] = b.cond_g;
      g["cond_omega"] = b.cond_omega;
      g["spray"] = finsler::to_json(b.spray);
      g["gamma"] = finsler::to_json(b.gamma);
      geo.push_back(g);
      c.text << "point " << i << " " << point_text(b.point) << ": E = " << short_num(b.energy)
             << ", cond(g) = " << short_num(b.cond_g) << "\n";
    }
    c.results["geometry"] = geo;
    if (defaults || has("identities") || deep) run_identities(r, deep, c);
    std::vector<nullity::NullityReport> all;
    if (!ws.empty()) all = run_nullity(r, ws, false, c);
    if (has("bracket")) run_brackets(r, c);
    if (has("classify")) run_classify(r, c);
    csv = nullity::spectra_csv(all);
  } else if (cfg.command == "nullity") {
    if (ws.empty()) ws = {Which::Barthel, Which::R, Which::P, Which::Q};
    csv = nullity::spectra_csv(run_nullity(r, ws, true, c));
  } else if (cfg.command == "bracket") {
    run_brackets(r, c);
    csv = c.csv.str();
  } else if (cfg.command == "classify") {
    csv = classify_csv(run_classify(r, c));
  } else if (cfg.command == "verify") {
    csv = identities_csv(run_identities(r, deep, c));
  } else {
    throw ConfigError("unknown command '" + cfg.command + "'");
  }

  o.exit_code = c.failed ? kExitCheckFailed : kExitOk;
  if (cfg.format == "json") {
    auto j = envelope(cfg);
    j["points"] = pts;
    j["results"] = c.results;
    j["errata"] = ordered_json::array();
    o.report = finish_json(j, o.exit_code);
  } else if (cfg.format == "csv") {
    o.report = csv;
  } else {
    o.report = c.text.str() + (c.failed ? "result: FAIL\n" : "result: pass\n") + elapsed();
  }
  return o;
}

namespace {

struct Flags {
  std::string config, energy, format, out;
  int dim = 0, samples = 0, max_rejects = 0, example_id = 0;
  double tol = 0, kernel_tol = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> points, fields, checks, box, constraints;
  bool deep = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "flat key = value file; flags override it");
  sub->add_option("--energy", f.energy, "energy expression in x1..xn, y1..yn");
  sub->add_option("--dim", f.dim, "dimension n");
  sub->add_option("--point", f.points, "x1,..,xn;y1,..,yn (repeatable)");
  sub->add_option("--samples", f.samples, "number of sampled points");
  sub->add_option("--box", f.box, "lo,hi sampling interval (one for all coordinates or 2n)");
  sub->add_option("--constraint", f.constraints, "sampling constraint, e.g. \"y2^3+y3^3+5*y4^3 = 0\"");
  sub->add_option("--max-rejects", f.max_rejects, "sampler rejection limit");
  sub->add_option("--tol", f.tol, "relative tolerance for checks");
  sub->add_option("--kernel-tol", f.kernel_tol, "relative singular-value cutoff");
  sub->add_option("--seed", f.seed, "sampler seed");
  sub->add_option("--format", f.format, "text, json or csv");
  sub->add_option("--out", f.out, "write the report to this file");
  sub->add_option("--field", f.fields, "name=e1,..,en horizontal field (repeatable)");
  sub->add_option("--checks", f.checks, "identities, deep-checks, nullity:R|P|Q|barthel, bracket, classify");
  sub->add_flag("--deep-checks", f.deep, "add identities needing derivatives of curvature");
}

RunConfig merge(const CLI::App* sub, const Flags& f) {
  RunConfig c;
  if (sub->count("--config")) c = load_config(f.config, c);
  c.command = sub->get_name();
  auto set = [&](const char* name) { return sub->count(name) > 0; };
  if (set("--energy")) c.energy = f.energy;
  if (set("--dim")) c.dim = f.dim;
  if (set("--point")) c.points = f.points;
  if (set("--samples")) c.samples = f.samples;
  if (set("--box")) c.box = f.box;
  if (set("--constraint")) c.constraints = f.constraints;
  if (set("--max-rejects")) c.max_rejects = f.max_rejects;
  if (set("--tol")) c.tol = f.tol;
  if (set("--kernel-tol")) c.kernel_tol = f.kernel_tol;
  if (set("--seed")) c.seed = f.seed;
  if (set("--format")) c.format = f.format;
  if (set("--out")) c.out = f.out;
  if (set("--field")) c.fields = f.fields;
  if (set("--checks")) c.checks = f.checks;
  if (f.deep) c.deep = true;
  if (c.command == "example") c.example_id = f.example_id;
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nullity distributions of Finsler curvature tensors", "nullity-lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Flags f;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"analyze", "nullity", "bracket", "classify", "verify", "example"}) {
    static const std::map<std::string, std::string> help = {
        {"analyze", "geometry, identities and nullity at the given points"},
        {"nullity", "nullity spaces, spectra and integrability"},
        {"bracket", "Lie brackets of the given fields, checked against finite differences"},
        {"classify", "Riemannian, Landsberg, Berwald, h-isotropic and S3-like tests"},
        {"verify", "identity suite"},
        {"example", "reproduce example 1, 2 or 3 with a printed-table ledger"}};
    auto* s = app.add_subcommand(name, help.at(name));
    add_common(s, f);
    subs[name] = s;
  }
  subs["example"]->add_option("id", f.example_id, "1, 2 or 3")->required()->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    auto chosen = app.get_subcommands();
    out << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nullity-lab: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunConfig cfg = merge(app.get_subcommands().front(), f);
    Outcome o = execute(cfg);
    if (!cfg.out.empty()) {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) throw ConfigError("cannot write '" + cfg.out + "'");
      file << o.report;
    } else {
      out << o.report;
    }
    return o.exit_code;
  } catch (const ConfigError& e) {
    err << "nullity-lab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dsl::ParseError& e) {
    err << "nullity-lab: parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dsl::VariableError& e) {
    err << "nullity-lab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AdmissibilityError& e) {
    err << "nullity-lab: admissibility: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const oracle::SamplerError& e) {
    err << "nullity-lab: admissibility: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const dsl::DomainError& e) {
    err << "nullity-lab: admissibility: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const std::invalid_argument& e) {
    err << "nullity-lab: config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace finsler::cli
