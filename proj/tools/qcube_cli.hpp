#pragma once

// Command-line front end. Every subcommand produces a list of flat records
// rendered as JSON (object or array) or RFC-4180 CSV. Exact counts are
// always emitted as decimal strings.

#include <qcube/qcube.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qcube::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCapacity = 3;

struct RunConfig {
  std::string format = "json";
  bool format_given = false;
  unsigned threads = default_thread_count();
  std::optional<std::string> cache_dir;
  std::optional<int> small_threshold;
  std::uint64_t seed = 0;
  double alpha = kDefaultAlpha;
  std::optional<std::string> out;
};

inline std::string csv_field(const Json& v) {
  std::string s;
  if (v.is_null()) return "";
  if (v.is_string()) s = v.get<std::string>();
  else s = v.dump();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  return quoted + "\"";
}

/// Header from the first record's keys; one line per record.
inline std::string to_csv(const std::vector<Json>& rows) {
  std::ostringstream os;
  if (rows.empty()) return "";
  bool first = true;
  for (const auto& [key, value] : rows.front().items()) {
    os << (first ? "" : ",") << csv_field(key);
    first = false;
  }
  os << "\r\n";
  for (const auto& row : rows) {
    first = true;
    for (const auto& [key, value] : rows.front().items()) {
      os << (first ? "" : ",") << csv_field(row.contains(key) ? row.at(key) : Json());
      first = false;
    }
    os << "\r\n";
  }
  return os.str();
}

inline std::string render(const std::vector<Json>& rows, const std::string& format, bool single) {
  if (format == "csv") return to_csv(rows);
  if (single && rows.size() == 1) return rows.front().dump() + "\n";
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(r);
  return arr.dump() + "\n";
}

inline std::optional<std::filesystem::path> cache_path(const RunConfig& cfg) {
  if (cfg.cache_dir) return std::filesystem::path(*cfg.cache_dir);
  return std::nullopt;
}

inline ProfileTable profiles_for(int d, const RunConfig& cfg) {
  return cached_profiles(Dim(d), {ClosureFeature::None, cfg.threads, -1}, cache_path(cfg));
}

inline Json audit_row(const FamilyAudit& a, double gamma) {
  return Json{
      {"d", a.query.d.value()},
      {"a", a.query.a},
      {"g", a.query.g},
      {"t", a.t},
      {"gamma", gamma},
      {"family_size", std::to_string(a.family_size)},
      {"log2_size", a.log2_size},
      {"g_minus_t", a.query.g - a.t},
      {"within_g", a.within_g()},
      {"within_g_minus_t", a.within_g_minus_t()},
      {"image_size", a.image_size},
      {"max_preimage", a.max_preimage},
      {"case1", a.case1_count},
      {"case2", a.case2_count},
      {"max_certificate_bits", a.max_certificate_bits},
      {"case2_reference", a.case2_reference},
      {"roundtrip_ok", a.roundtrip_ok},
      {"certificate_bound_ok", a.certificate_bound_ok},
      {"in_lemma_regime", a.in_lemma_regime},
  };
}

/// Parses argv and runs one subcommand, writing results to `out` (or the
/// --out file) and diagnostics to `err`. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact enumeration and certificate checks for balanced independent sets in Q_d", "qcube"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may also follow the subcommand
  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->each([&](const std::string&) {
    cfg.format_given = true;
  });
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--cache", cfg.cache_dir, "Profile cache directory");
  app.add_option("--small-threshold", cfg.small_threshold, "Override the small/large component threshold (default d^4)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for heuristic scans");
  app.add_option("--alpha", cfg.alpha, "Default alpha for entropy checks")->check(CLI::Range(0.0, 0.5));

  int d = 0;
  auto add_d = [&](CLI::App* sub) { sub->add_option("--d", d, "Cube dimension")->required(); };

  std::vector<Json> rows;
  bool single = true;

  // count
  auto* count = app.add_subcommand("count", "Exact counts of (balanced) independent sets");
  add_d(count);
  std::string what = "bis";
  count->add_option("--what", what)->check(CLI::IsMember({"bis", "is", "by-size"}));

  // profile
  auto* profile = app.add_subcommand("profile", "Sweep all even subsets and write the profile cache");
  add_d(profile);
  std::string profile_out;
  std::string closure_mode = "none";
  profile->add_option("--out", profile_out, "Cache file to write")->required();
  profile->add_option("--closure", closure_mode)->check(CLI::IsMember({"none", "split"}));

  auto* maxbis = app.add_subcommand("maxbis", "Maximum BIS size: closed form vs profile search");
  add_d(maxbis);

  auto* lowerbound = app.add_subcommand("lowerbound", "Balanced subsets of a maximum BIS");
  add_d(lowerbound);

  auto* scaling = app.add_subcommand("scaling", "Per-d scaling diagnostics (plot-ready)");
  int d_min = 1;
  int d_max = 5;
  scaling->add_option("--d-min", d_min)->required();
  scaling->add_option("--d-max", d_max)->required();
  scaling->add_option("--out", cfg.out, "Output file");

  auto* iso = app.add_subcommand("isoperimetry", "Minimum vertex-expansion deficit over |A| <= S");
  add_d(iso);
  int max_size = 1;
  std::string mode = "exhaustive";
  iso->add_option("--max-size", max_size)->required();
  iso->add_option("--mode", mode)->check(CLI::IsMember({"exhaustive", "heuristic"}));

  auto* small = app.add_subcommand("smallsets", "Maximum |A| d / |N(A)| over |A| <= S");
  add_d(small);
  small->add_option("--max-size", max_size)->required();

  auto* cont = app.add_subcommand("containers", "Family G(a, g) size and approximation image");
  add_d(cont);
  int fa = 0;
  int fg = 0;
  bool list = false;
  cont->add_option("--a", fa)->required();
  cont->add_option("--g", fg)->required();
  cont->add_flag("--list", list, "List members as hex bitmaps");

  auto* certify = app.add_subcommand("certify", "Certificate roundtrip and cost report over families");
  add_d(certify);
  double gamma = kDefaultGamma;
  std::string phi_name = "trivial";
  std::optional<int> ca;
  std::optional<int> cg;
  certify->add_option("--gamma", gamma);
  certify->add_option("--phi", phi_name)->check(CLI::IsMember({"trivial"}));
  certify->add_option("--a", ca);
  certify->add_option("--g", cg);

  auto* audit = app.add_subcommand("audit", "Component cost audit of an explicit even set");
  add_d(audit);
  std::string hex;
  audit->add_option("--set", hex, "Hex bitmap, bit i = vertex i")->required();
  audit->add_option("--gamma", gamma);

  auto* bounds = app.add_subcommand("bounds", "Numerical checks of the supporting inequalities");
  std::string check;
  std::optional<int> bn;
  std::optional<int> bm;
  std::optional<int> bb;
  std::optional<int> bx;
  std::optional<int> bd;
  std::uint32_t bv = 0;
  int bk = 2;
  std::optional<double> balpha;
  bounds->add_option("--check", check)->required()->check(CLI::IsMember({"entropy", "compositions", "linked"}));
  bounds->add_option("--n", bn);
  bounds->add_option("--alpha", balpha);
  bounds->add_option("--m", bm);
  bounds->add_option("--b", bb);
  bounds->add_option("--d", bd);
  bounds->add_option("--x", bx);
  bounds->add_option("--v", bv);
  bounds->add_option("--k", bk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*count) {
      const auto table = profiles_for(d, cfg);
      if (what == "bis") {
        rows.push_back({{"d", d}, {"bis", to_decimal(count_bis(table))}});
      } else if (what == "is") {
        rows.push_back({{"d", d}, {"is", to_decimal(count_is(table))}});
      } else {
        single = false;
        for (const auto& [k, n] : count_bis_by_size(table)) rows.push_back({{"d", d}, {"k", k}, {"count", to_decimal(n)}});
      }
    } else if (*profile) {
      const auto feature = closure_mode == "split" ? ClosureFeature::Split : ClosureFeature::None;
      const auto table = sweep_profiles(Dim(d), {feature, cfg.threads, -1});
      save_profile(table, profile_out);
      rows.push_back({{"d", d},
                      {"closure", closure_mode},
                      {"entries", table.entries().size()},
                      {"total", to_decimal(table.total())},
                      {"path", profile_out}});
    } else if (*maxbis) {
      const Count formula = barber_formula(Dim(d));
      const int search = max_bis_size(profiles_for(d, cfg));
      rows.push_back({{"d", d},
                      {"formula", static_cast<std::uint64_t>(formula)},
                      {"search", search},
                      {"agree", formula == static_cast<Count>(search)}});
    } else if (*lowerbound) {
      rows.push_back({{"d", d},
                      {"max_bis", static_cast<std::uint64_t>(barber_formula(Dim(d)))},
                      {"lower_bound", to_decimal(lower_bound_series(Dim(d)))}});
    } else if (*scaling) {
      single = false;
      if (!cfg.format_given) cfg.format = "csv";
      for (const auto& r : scaling_stats(d_min, d_max, {ClosureFeature::None, cfg.threads, -1}, cache_path(cfg))) {
        rows.push_back({{"d", r.d},
                        {"bis", to_decimal(r.bis)},
                        {"is", to_decimal(r.is_count)},
                        {"log2_bis", r.log2_bis},
                        {"x_d", r.x_d},
                        {"is_ratio", r.is_ratio},
                        {"x_lower", r.x_lower ? Json(*r.x_lower) : Json()}});
      }
    } else if (*iso) {
      const auto m = mode == "heuristic" ? ScanMode::Heuristic : ScanMode::Exhaustive;
      const auto r = isoperimetry_scan(Dim(d), max_size, m, cfg.seed, cfg.threads);
      rows.push_back({{"d", d},
                      {"max_size", max_size},
                      {"mode", mode},
                      {"set_size", r.set_size},
                      {"boundary_size", r.boundary_size},
                      {"deficit", r.deficit},
                      {"normalized", r.normalized},
                      {"argmin", r.argmin.to_hex()},
                      {"scanned", r.sets_scanned}});
    } else if (*small) {
      const auto r = small_set_expansion_scan(Dim(d), max_size, cfg.threads);
      rows.push_back({{"d", d},
                      {"max_size", max_size},
                      {"ratio", r.ratio},
                      {"set_size", r.set_size},
                      {"boundary_size", r.boundary_size},
                      {"argmax", r.argmax.to_hex()},
                      {"scanned", r.sets_scanned}});
    } else if (*cont) {
      const FamilyQuery q{Dim(d), fa, fg};
      const auto family = enumerate_family(q);
      if (list) {
        single = false;
        for (std::size_t i = 0; i < family.size(); ++i) {
          rows.push_back({{"d", d}, {"a", fa}, {"g", fg}, {"index", i}, {"member", family[i].to_hex()}});
        }
      } else {
        const auto pairs = build_pair_index(q, family, phi_trivial);
        rows.push_back({{"d", d},
                        {"a", fa},
                        {"g", fg},
                        {"t", q.t()},
                        {"family_size", std::to_string(family.size())},
                        {"log2_size", family.empty() ? Json() : Json(std::log2(static_cast<double>(family.size())))},
                        {"image_size", pairs.image_size()},
                        {"max_preimage", pairs.max_preimage()},
                        {"in_lemma_regime", q.in_lemma_regime()}});
      }
    } else if (*certify) {
      single = false;
      if (ca.has_value() != cg.has_value()) {
        err << "usage error: --a and --g go together\n";
        return kExitUsage;
      }
      if (ca) {
        const FamilyQuery q{Dim(d), *ca, *cg};
        rows.push_back(audit_row(audit_family(q, phi_trivial, gamma), gamma));
      } else {
        const FamilyIndex index{Dim(d)};
        for (const auto& [a, g] : index.feasible()) {
          const FamilyQuery q{Dim(d), a, g};
          std::vector<VertexSet> family;
          for (auto m : index.family(a, g)) family.push_back(index.cube().evens_to_set(m));
          rows.push_back(audit_row(audit_family(q, family, phi_trivial, gamma), gamma));
        }
      }
      for (auto& r : rows) r["gamma_admissible"] = gamma_admissible(gamma);
    } else if (*audit) {
      single = false;
      const auto set = VertexSet::from_hex(Dim(d), hex);
      const auto r = cost_audit(set, gamma, cfg.small_threshold);
      for (std::size_t i = 0; i < r.components.size(); ++i) {
        const auto& c = r.components[i];
        rows.push_back({{"d", d},
                        {"g", r.g},
                        {"c_of_a", r.c_of_a},
                        {"decomposition_bits", r.decomposition_bits},
                        {"total_bits", r.total_bits},
                        {"ref_g_log_d_over_d", r.ref_g_log_d_over_d},
                        {"sum_t_large", r.sum_t_large},
                        {"component", i},
                        {"members", c.profile.members.to_hex()},
                        {"class", std::string(to_string(c.profile.cls))},
                        {"a_i", c.profile.a},
                        {"g_i", c.profile.g},
                        {"closure_i", c.profile.closure},
                        {"t_i", c.profile.t},
                        {"bits", c.bits},
                        {"family_bits", c.family_bits ? Json(*c.family_bits) : Json()},
                        {"certificate_bits", c.certificate_bits ? Json(*c.certificate_bits) : Json()},
                        {"within_g_i", c.within_g()}});
      }
    } else if (*bounds) {
      single = false;
      if (check == "entropy") {
        std::vector<int> ns;
        std::vector<double> alphas;
        if (bn) ns = {*bn};
        else for (int n = 1; n <= 30; ++n) ns.push_back(n);
        if (balpha) alphas = {*balpha};
        else alphas = {cfg.alpha};
        for (int n : ns) {
          for (double a : alphas) {
            const auto r = check_binom_tail(n, a);
            rows.push_back({{"n", n}, {"alpha", a}, {"sum", to_decimal(r.sum)}, {"log2_bound", r.log2_bound}, {"holds", r.holds}});
          }
        }
      } else if (check == "compositions") {
        std::vector<int> ms;
        if (bm) ms = {*bm};
        else for (int m = 1; m <= 20; ++m) ms.push_back(m);
        for (int m : ms) {
          const auto r = compositions(m, bb);
          Json row{{"m", m}, {"total", to_decimal(r.total)}};
          if (bb) {
            row["b"] = *bb;
            row["at_most_b"] = to_decimal(r.at_most_b);
            row["index_sum"] = to_decimal(r.index_sum);
            row["exp2_bound"] = r.exp2_bound;
          }
          rows.push_back(row);
        }
      } else {
        if (!bd) {
          err << "usage error: --d is required for --check linked\n";
          return kExitUsage;
        }
        std::vector<int> xs;
        if (bx) xs = {*bx};
        else for (int x = 1; x <= kMaxLinkedSize; ++x) xs.push_back(x);
        for (int x : xs) {
          const auto r = linked_sets_count(Dim(*bd), x, Vertex{bv}, bk);
          rows.push_back({{"d", *bd}, {"x", x}, {"v", bv}, {"k", bk}, {"count", to_decimal(r.count)},
                          {"constant", r.constant ? Json(*r.constant) : Json()}});
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.is_capacity()) return kExitCapacity;
    switch (e.kind()) {
      case ErrorKind::DomainError:
      case ErrorKind::InvalidArgument:
      case ErrorKind::InvalidGamma:
      case ErrorKind::MixedParity:
      case ErrorKind::NotTwoLinked:
      case ErrorKind::EmptyInput:
        return kExitUsage;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  const std::string text = render(rows, cfg.format, single);
  if (cfg.out) {
    std::ofstream file(*cfg.out, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot write " << *cfg.out << "\n";
      return kExitFailure;
    }
    file << text;
  } else {
    out << text;
  }
  return kExitOk;
}

}  // namespace qcube::cli
