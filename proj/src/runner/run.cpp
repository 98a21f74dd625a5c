#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dehn/estimator.hpp"
#include "dehn/filling.hpp"
#include "dehn/metric.hpp"
#include "dehn/runner.hpp"
#include "dehn/walk.hpp"

#ifndef DEHN_VERSION
#define DEHN_VERSION "0.1.0"
#endif

namespace dehn {

using nlohmann::json;

const char* version_string() { return DEHN_VERSION; }

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json fit_json(const std::optional<ExponentFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope},
          {"intercept", f->intercept},
          {"slope_stderr", f->slope_stderr},
          {"points_used", f->points_used},
          {"dropped_first", f->dropped_first}};
}

json curve_json(const CurveReport& r, const char* scale) {
  json pts = json::array();
  for (std::size_t i = 0; i < r.curve.points.size(); ++i) {
    const auto& p = r.curve.points[i];
    pts.push_back({{scale, p.scale},
                   {"mean", p.value},
                   {"stderr", p.stderr_},
                   {"samples", p.samples},
                   {"failures", i < r.failures.size() ? r.failures[i] : 0}});
  }
  return pts;
}

std::string curve_csv(const CurveReport& r, const char* scale) {
  std::ostringstream out;
  out << scale << ",mean,stderr,samples,failures\n";
  for (std::size_t i = 0; i < r.curve.points.size(); ++i) {
    const auto& p = r.curve.points[i];
    out << static_cast<std::int64_t>(p.scale) << ',' << num(p.value) << ',' << num(p.stderr_) << ',' << p.samples
        << ',' << (i < r.failures.size() ? r.failures[i] : 0) << '\n';
  }
  return out.str();
}

MonteCarloOptions mc_options(const ExperimentConfig& c, SamplerChoice sampler) {
  MonteCarloOptions o;
  o.sampler = sampler;
  o.samples = static_cast<std::size_t>(c.samples);
  o.seed = c.seed;
  o.workers = c.workers > 0 ? c.workers : default_workers();
  o.max_attempts = c.max_attempts;
  return o;
}

// Tries the configured sampler, then each fallback, when tables do not fit.
template <class Fn>
auto with_sampler(const ExperimentConfig& c, json& warnings, Fn&& fn) {
  std::vector<std::string> chain{c.sampler};
  chain.insert(chain.end(), c.fallbacks.begin(), c.fallbacks.end());
  for (std::size_t i = 0;; ++i) {
    try {
      return fn(mc_options(c, parse_sampler(chain[i])));
    } catch (const BudgetExceeded& e) {
      if (i + 1 == chain.size()) throw;
      warnings.push_back("sampler " + chain[i] + " unavailable (" + e.what() + "), falling back to " + chain[i + 1]);
    }
  }
}

void run_sample(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const int n = *c.n;
  std::ostringstream csv;
  csv << "index,word,attempts\n";
  with_sampler(c, warnings, [&](const MonteCarloOptions& o) {
    LoopSource src(spec, o.sampler, n, o.max_attempts);
    std::vector<LoopSample> out(o.samples);
    parallel_for(o.samples, o.workers, [&](std::size_t i) { out[i] = src.sample(n, o.seed, substream(0, n, i)); });
    std::vector<double> attempts;
    for (std::size_t i = 0; i < out.size(); ++i) {
      csv << i << ',' << format_word(out[i].word) << ',' << out[i].attempts << '\n';
      attempts.push_back(static_cast<double>(out[i].attempts));
    }
    const Summary s = summarize(attempts);
    r.record["method"] = to_string(src.kind());
    r.record["samples"] = out.size();
    r.record["mean_attempts"] = s.mean;
    return 0;
  });
  r.csv = csv.str();
}

void run_fill(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const Word w = parse_word(c.word);
  const std::string area = c.area.empty() ? "dyadic" : c.area;
  FillingCertificate cert;
  if (area == "exact") {
    auto found = exact_area_certificate(spec, w);
    if (!found) {
      r.partial = true;
      warnings.push_back("exact search did not resolve within the default limits");
      return;
    }
    cert = *found;
  } else if (area == "dyadic") {
    cert = dyadic_fill(spec, w);
  } else {
    throw ConfigError("area", 0, "kind fill needs area dyadic or exact");
  }
  const bool ok = verify_certificate(spec, cert);
  r.record["area"] = cert.area();
  r.record["certificate_letters"] = cert.letters();
  r.record["verified"] = ok;
  try {
    r.record["centralized_area"] = centralized_area(spec, w);
    if (spec.kind() == GroupKind::FreeAbelian && spec.generator_count() == 2) r.record["winding_area"] = winding_area(w);
  } catch (const Unsupported&) {
  }
  if (!ok) r.partial = true;
  std::ostringstream out;
  write_certificate(out, spec, cert);
  r.record["certificate_tsv"] = c.output.certificate.empty() ? json(out.str()) : json(c.output.certificate);
  r.csv = out.str();
}

void run_avg_area(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const AreaFn fn = parse_area_fn(c.area.empty() ? "dyadic" : c.area);
  const CurveReport upper = with_sampler(
      c, warnings, [&](const MonteCarloOptions& o) { return avg_area_curve(spec, c.n_list, fn, o); });
  r.record["area"] = to_string(fn);
  r.record["points"] = curve_json(upper, "n");
  r.record["fit"] = fit_json(upper.fit);
  for (const auto& w : upper.warnings) warnings.push_back(w);
  if (fn == AreaFn::Dyadic) {
    try {
      const CurveReport lower = with_sampler(
          c, warnings, [&](const MonteCarloOptions& o) { return central_moment_curve(spec, c.n_list, o); });
      json br = json::array();
      for (std::size_t i = 0; i < upper.curve.points.size(); ++i)
        br.push_back({{"n", upper.curve.points[i].scale},
                      {"lower", lower.curve.points[i].value},
                      {"upper", upper.curve.points[i].value}});
      r.record["bracket"] = br;
    } catch (const Unsupported& e) {
      warnings.push_back(std::string("no lower proxy: ") + e.what());
    }
  }
  r.csv = curve_csv(upper, "n");
}

void run_moments(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const CurveReport rep = with_sampler(
      c, warnings, [&](const MonteCarloOptions& o) { return moment_curve(spec, *c.n, c.t_list, c.m, o); });
  r.record["points"] = curve_json(rep, "t");
  std::vector<int> positive;
  CurveReport fitted;
  for (std::size_t i = 0; i < rep.curve.points.size(); ++i)
    if (rep.curve.points[i].scale > 0 && rep.curve.points[i].value > 0) {
      const auto& p = rep.curve.points[i];
      fitted.curve.add(p.scale, p.value, p.stderr_, p.samples);
    }
  std::optional<ExponentFit> fit;
  if (fitted.curve.points.size() >= 3) fit = exponent_fit(fitted.curve);
  r.record["fit"] = fit_json(fit);
  for (const auto& w : rep.warnings) warnings.push_back(w);
  if (std::any_of(rep.failures.begin(), rep.failures.end(), [](std::int64_t f) { return f > 0; })) r.partial = true;
  r.csv = curve_csv(rep, "t");
}

void run_central(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const CurveReport rep = with_sampler(
      c, warnings, [&](const MonteCarloOptions& o) { return central_moment_curve(spec, c.n_list, o); });
  r.record["points"] = curve_json(rep, "n");
  r.record["fit"] = fit_json(rep.fit);
  r.record["slope"] = rep.fit ? json(rep.fit->slope) : json(nullptr);
  for (const auto& w : rep.warnings) warnings.push_back(w);
  r.csv = curve_csv(rep, "n");
}

void run_hsc(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const HscReport rep = hsc_check(spec, c.n_list, c.c_double_prime, c.truncation_ratio);
  std::ostringstream csv;
  csv << "n,p_identity,support,lost_mass,c_upper,cprime_upper,upper_violations,lower_region,c_lower,cprime_lower,"
         "lower_violations\n";
  json pts = json::array();
  for (const auto& p : rep.points) {
    csv << p.n << ',' << num(p.p_identity) << ',' << p.support << ',' << num(p.lost_mass) << ',' << num(p.c_upper)
        << ',' << num(p.cprime_upper) << ',' << p.upper_violations << ',' << p.lower_region << ',' << num(p.c_lower)
        << ',' << num(p.cprime_lower) << ',' << p.lower_violations << '\n';
    pts.push_back({{"n", p.n},
                   {"p_identity", p.p_identity},
                   {"support", p.support},
                   {"lost_mass", p.lost_mass},
                   {"c_upper", p.c_upper},
                   {"cprime_upper", p.cprime_upper},
                   {"upper_violations", p.upper_violations},
                   {"lower_region", p.lower_region},
                   {"c_lower", p.c_lower},
                   {"cprime_lower", p.cprime_lower},
                   {"lower_violations", p.lower_violations}});
    if (p.lost_mass > 0) warnings.push_back("n=" + std::to_string(p.n) + ": truncation lost mass " + num(p.lost_mass));
  }
  r.record["growth_degree"] = rep.growth_degree;
  r.record["points"] = pts;
  r.record["joint"] = {{"c_upper", rep.c_upper},
                       {"cprime_upper", rep.cprime_upper},
                       {"upper_violations", rep.upper_violations},
                       {"c_lower", rep.c_lower},
                       {"cprime_lower", rep.cprime_lower},
                       {"lower_violations", rep.lower_violations}};
  r.record["decay_fit"] = fit_json(rep.decay);
  r.record["expected_decay_slope"] = -rep.growth_degree / 2.0;
  r.csv = csv.str();
  if (!c.output.table.empty()) {
    const StepMeasure m = step_measure(spec);
    ProbabilityTable t = ProbabilityTable::delta(spec, c.truncation_ratio);
    while (t.step_count() < c.n_list.back()) t = convolve(t, m);
    std::ostringstream out;
    write_csv(out, t);
    atomic_write(c.output.table, out.str());
  }
}

void run_ratio(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json&) {
  std::ostringstream csv;
  csv << "x,n,ratio\n";
  json series = json::array();
  if (c.arithmetic == "exact") {
    ExactTable t(spec);
    const GroupElement e = spec.identity();
    for (const auto& xs : c.x_list) series.push_back({{"x", xs}, {"ratios", json::array()}, {"missing", json::array()}});
    for (int n : c.n_list) {
      while (t.step_count() < n) t.step();
      for (std::size_t k = 0; k < c.x_list.size(); ++k) {
        const GroupElement x = eval_word(spec, parse_word(c.x_list[k]));
        const std::uint64_t cx = t.count(x), ce = t.count(e);
        if (cx == 0 || ce == 0) {
          series[k]["missing"].push_back(n);
          continue;
        }
        const double ratio = static_cast<double>(cx) / static_cast<double>(ce);
        series[k]["ratios"].push_back({{"n", n}, {"numerator", cx}, {"denominator", ce}, {"ratio", ratio}});
        csv << c.x_list[k] << ',' << n << ',' << num(ratio) << '\n';
      }
    }
  } else {
    std::vector<GroupElement> xs;
    for (const auto& w : c.x_list) xs.push_back(eval_word(spec, parse_word(w)));
    const auto rep = ratio_limit_check(spec, xs, c.n_list, c.truncation_ratio);
    for (std::size_t k = 0; k < rep.size(); ++k) {
      json pts = json::array();
      for (const auto& [n, ratio] : rep[k].ratios) {
        pts.push_back({{"n", n}, {"ratio", ratio}});
        csv << c.x_list[k] << ',' << n << ',' << num(ratio) << '\n';
      }
      series.push_back({{"x", c.x_list[k]},
                        {"ratios", pts},
                        {"missing", rep[k].missing},
                        {"monotone_violations", rep[k].monotone_violations}});
    }
  }
  r.record["series"] = series;
  r.csv = csv.str();
}

void run_shift(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const ShiftMode mode = c.arithmetic == "exact" ? ShiftMode::Exact : ShiftMode::Sampled;
  const ShiftReport rep = with_sampler(c, warnings, [&](const MonteCarloOptions& o) {
    return shift_invariance_test(spec, *c.n, *c.s, *c.t, mode, o);
  });
  std::ostringstream csv;
  if (mode == ShiftMode::Exact) {
    csv << "distance,shifted,origin\n";
    std::map<int, std::pair<std::uint64_t, std::uint64_t>> joined;
    for (const auto& [d, k] : rep.shifted) joined[d].first = k;
    for (const auto& [d, k] : rep.origin) joined[d].second = k;
    for (const auto& [d, p] : joined) csv << d << ',' << p.first << ',' << p.second << '\n';
    r.record["identical"] = rep.identical;
    r.record["loops"] = rep.samples;
  } else {
    csv << "statistic,p_value,samples\n" << num(rep.ks.statistic) << ',' << num(rep.ks.p_value) << ',' << rep.samples << '\n';
    r.record["ks_statistic"] = rep.ks.statistic;
    r.record["p_value"] = rep.ks.p_value;
    r.record["samples"] = rep.samples;
  }
  r.record["mode"] = mode == ShiftMode::Exact ? "exact" : "sampled";
  r.csv = csv.str();
}

void run_enumerate(const ExperimentConfig& c, const GroupSpec& spec, RunResult& r, json& warnings) {
  const LoopEnumeration e = enumerate_loops(spec, *c.n);
  r.record["words"] = e.word_count;
  r.record["loops"] = e.loop_count();
  r.record["loop_probability"] = static_cast<double>(e.loop_count()) / static_cast<double>(e.word_count);
  std::string area = c.area;
  if (area.empty())
    area = spec.kind() == GroupKind::FreeAbelian && spec.generator_count() == 2 ? "winding" : "centralized";
  try {
    const AreaFn fn = parse_area_fn(area);
    const auto [numer, denom] = exact_mean(e, [&](const LazyWord& w) {
      return static_cast<std::int64_t>(std::llround(area_of(spec, w, fn)));
    });
    r.record["area"] = area;
    r.record["area_sum"] = numer;
    r.record["avg_area"] = denom ? static_cast<double>(numer) / static_cast<double>(denom) : 0.0;
  } catch (const Error& ex) {
    warnings.push_back(std::string("area skipped: ") + ex.what());
  }
  std::ostringstream csv;
  csv << "t,distance,count\n";
  for (std::size_t t = 0; t < e.distance.size(); ++t)
    for (const auto& [d, k] : e.distance[t]) csv << t << ',' << d << ',' << k << '\n';
  r.csv = csv.str();
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const GroupSpec spec = GroupSpec::from_id(cfg.group);
  RunResult r;
  json warnings = json::array();
  r.record["version"] = version_string();
  r.record["config_hash"] = config_hash(cfg);
  r.record["seed"] = cfg.seed;
  r.record["config"] = to_json(cfg);
  r.record["started"] = utc_now();
  try {
    if (cfg.kind == "sample") run_sample(cfg, spec, r, warnings);
    else if (cfg.kind == "fill") run_fill(cfg, spec, r, warnings);
    else if (cfg.kind == "avg-area") run_avg_area(cfg, spec, r, warnings);
    else if (cfg.kind == "moments") run_moments(cfg, spec, r, warnings);
    else if (cfg.kind == "central-moments") run_central(cfg, spec, r, warnings);
    else if (cfg.kind == "hsc") run_hsc(cfg, spec, r, warnings);
    else if (cfg.kind == "ratio") run_ratio(cfg, spec, r, warnings);
    else if (cfg.kind == "shift-test") run_shift(cfg, spec, r, warnings);
    else if (cfg.kind == "enumerate") run_enumerate(cfg, spec, r, warnings);
  } catch (const SamplerFailure& e) {
    r.partial = true;
    warnings.push_back(std::string("sampler failure: ") + e.what());
  } catch (const BudgetExceeded& e) {
    r.partial = true;
    warnings.push_back(std::string("budget exceeded: ") + e.what());
  } catch (const CapExceeded& e) {
    r.partial = true;
    warnings.push_back(std::string("metric cap exceeded: ") + e.what());
  }
  r.record["warnings"] = warnings;
  r.record["partial"] = r.partial;
  r.record["finished"] = utc_now();
  return r;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size() && std::fflush(f) == 0 &&
                    ::fsync(fileno(f)) == 0;
    std::fclose(f);
    if (!ok) {
      fs::remove(tmp);
      throw Error("write to " + tmp.string() + " failed");
    }
  }
  fs::rename(tmp, target);
}

RunResult run_and_write(const ExperimentConfig& cfg) {
  RunResult r = run_experiment(cfg);
  if (!cfg.output.csv.empty() && !r.csv.empty()) atomic_write(cfg.output.csv, r.csv);
  if (cfg.kind == "fill" && !cfg.output.certificate.empty() && !r.csv.empty())
    atomic_write(cfg.output.certificate, r.csv);
  if (!cfg.output.json.empty()) atomic_write(cfg.output.json, r.record.dump(2) + "\n");
  return r;
}

}  // namespace dehn
