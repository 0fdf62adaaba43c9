#ifndef ENLARGE_REPORT_HPP_
#define ENLARGE_REPORT_HPP_

// Audit reports: every table as "num/den" strings keyed by atom id, NA1
// verdicts with certificates, and the identity ledger. The report embeds the
// SHA-256 of the input text and the engine version.

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "enlarge/checks.hpp"
#include "enlarge/initial.hpp"
#include "enlarge/market_spec.hpp"
#include "enlarge/na1.hpp"
#include "enlarge/progressive.hpp"

namespace enlarge {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

/// {atom id: [x_0, ..., x_T]}
inline Json to_json(const ProcessPath& x, const FinSpace& space) {
  Json out = Json::object();
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    Json row = Json::array();
    for (Time t = 0; t <= x.horizon(); ++t) row.push_back(to_string(x.at(t, a)));
    out[space.id(a)] = std::move(row);
  }
  return out;
}

inline Json to_json(const StoppingMap& s, const FinSpace& space) {
  Json out = Json::object();
  for (std::size_t a = 0; a < space.atom_count(); ++a)
    out[space.id(a)] = s.is_finite(a) ? Json(s[a]) : Json("inf");
  return out;
}

inline Json atom_ids(const std::vector<std::size_t>& atoms, const FinSpace& space) {
  Json out = Json::array();
  for (std::size_t a : atoms) out.push_back(space.id(a));
  return out;
}

inline Json to_json(const Na1Verdict& v, const FinSpace& space) {
  Json out = Json::object();
  out["holds"] = v.holds;
  if (v.deflator) out["deflator"] = to_json(*v.deflator, space);
  Json certs = Json::array();
  for (const auto& c : v.certificates) {
    Json j = Json::object();
    j["time"] = c.time;
    j["cell"] = atom_ids(c.atoms, space);
    Json pos = Json::object();
    for (std::size_t i = 0; i < c.position.size(); ++i) pos[c.asset_names[i]] = to_string(c.position[i]);
    j["position"] = std::move(pos);
    Json kids = Json::array();
    for (std::size_t k = 0; k < c.child_cells.size(); ++k)
      kids.push_back(Json{{"cell", atom_ids(c.child_cells[k], space)},
                          {"wealth_increment", to_string(c.wealth_increment[k])}});
    j["children"] = std::move(kids);
    Json claim = Json::object();
    for (std::size_t a = 0; a < c.claim.size(); ++a) claim[space.id(a)] = to_string(c.claim[a]);
    j["claim"] = std::move(claim);
    certs.push_back(std::move(j));
  }
  out["certificates"] = std::move(certs);
  return out;
}

inline Json to_json(const std::vector<IdentityRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows)
    out.push_back(Json{{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"pass", r.pass}});
  return out;
}

inline Json report_header(const std::string& spec_text, const char* mode) {
  return Json{{"engine", "enlarge"}, {"version", kVersion}, {"spec_sha256", sha256_hex(spec_text)},
              {"mode", mode}};
}

struct AnalysisReport {
  Json json;
  bool identities_pass = false;
};

inline AnalysisReport progressive_report(const Model& m, const std::string& spec_text) {
  if (!m.tau) throw InputError("progressive mode needs a tau block");
  const FinSpace& space = m.space;
  AnalysisReport out{report_header(spec_text, "progressive")};
  Json& j = out.json;
  const AzemaBundle b = azema(space, *m.tau);
  const OptionalPair pair = optional_decomposition(b);
  const EtaData eta = eta_analysis(b, space);
  j["tau"] = to_json(*m.tau, space);
  j["azema"] = Json{{"Z", to_json(b.z, space)},       {"Z_tilde", to_json(b.z_tilde, space)},
                    {"A", to_json(b.a, space)},       {"dA", to_json(b.jump_a, space)},
                    {"mu", to_json(b.mu, space)}};
  j["decomposition"] = Json{{"K", to_json(pair.k, space)}, {"L", to_json(pair.l, space)}};
  Json levels = Json::array();
  for (const auto& lv : eta.zeta_levels)
    levels.push_back(Json{{"n", lv.n.get_str()}, {"zeta_n", to_json(lv.time, space)}});
  Json lambda = Json::object();
  for (std::size_t a = 0; a < space.atom_count(); ++a) lambda[space.id(a)] = bool(eta.lambda[a]);
  j["eta"] = Json{{"zeta", to_json(eta.zeta, space)},
                  {"zeta_levels", std::move(levels)},
                  {"lambda", std::move(lambda)},
                  {"eta", to_json(eta.eta, space)},
                  {"D", to_json(eta.compensator, space)},
                  {"S_arb", to_json(eta.arbitrage_asset, space)}};
  const GMarket gm = enlarge_progressive(space, *m.tau, m.assets);
  Json g_parts = Json::array();
  for (Time t = 0; t <= space.horizon(); ++t) {
    Json cells = Json::array();
    for (const auto& cell : gm.enlarged.partition(t).cells()) cells.push_back(atom_ids(cell, space));
    g_parts.push_back(std::move(cells));
  }
  j["G_filtration"] = std::move(g_parts);
  std::vector<Asset> arb{{"S_arb", eta.arbitrage_asset}};
  Json verdicts = Json::object();
  if (!m.assets.empty()) {
    verdicts["F"] = to_json(check_na1(space, m.assets), space);
    verdicts["G"] = to_json(check_na1(gm), space);
  }
  verdicts["F_S_arb"] = to_json(check_na1(space, arb), space);
  verdicts["G_S_arb_tau"] = to_json(check_na1(gm.enlarged, arb, *m.tau), space);
  j["verdicts"] = std::move(verdicts);
  const ProgressiveEquivalence eq = equivalence_report(space, *m.tau);
  j["equivalence"] = Json{{"P_eta_finite", to_string(eq.eta_finite_prob)},
                          {"one_over_L_tau_G_martingale", eq.one_over_l_tau_is_g_martingale},
                          {"all_lifts_G_martingales", eq.all_lifts_are_g_martingales}};
  const auto rows = progressive_identities(space, *m.tau);
  j["identities"] = to_json(rows);
  out.identities_pass = all_pass(rows);
  return out;
}

inline AnalysisReport initial_report(const Model& m, const std::string& spec_text) {
  if (!m.signal) throw InputError("initial mode needs a signal block");
  const FinSpace& space = m.space;
  const Signal& sig = *m.signal;
  AnalysisReport out{report_header(spec_text, "initial")};
  Json& j = out.json;
  const DensitySystem ds = density_system(space, sig);
  const EtaFamily fam = eta_family(ds, space, sig.label_of);
  Json gamma = Json::object(), labels = Json::object();
  for (std::size_t x = 0; x < sig.labels.size(); ++x) gamma[sig.labels[x]] = to_string(sig.gamma[x]);
  for (std::size_t a = 0; a < space.atom_count(); ++a) labels[space.id(a)] = sig.labels[sig.label_of[a]];
  j["signal"] = Json{{"labels", std::move(labels)}, {"gamma", std::move(gamma)}};
  Json per = Json::object();
  for (std::size_t x = 0; x < sig.labels.size(); ++x) {
    const auto& le = fam.per_label[x];
    per[sig.labels[x]] = Json{{"p", to_json(ds.p[x], space)},     {"zeta", to_json(le.zeta, space)},
                              {"eta", to_json(le.eta, space)},     {"D", to_json(le.compensator, space)},
                              {"S", to_json(le.asset, space)}};
  }
  j["labels"] = std::move(per);
  j["S_J"] = to_json(fam.composed, space);
  const GMarket gm = enlarge_initial(space, sig, m.assets);
  Json verdicts = Json::object();
  if (!m.assets.empty()) {
    verdicts["F"] = to_json(check_na1(space, m.assets), space);
    verdicts["G"] = to_json(check_na1(gm), space);
  }
  verdicts["G_S_J"] = to_json(check_na1(gm.enlarged, {{"S_J", fam.composed}}), space);
  j["verdicts"] = std::move(verdicts);
  const InitialEquivalence eq = equivalence_report_initial(space, sig);
  j["equivalence"] = Json{{"gamma_weighted_P_eta_finite", to_string(eq.gamma_weighted_eta_prob)},
                          {"one_over_pJ_G_martingale", eq.one_over_pj_is_g_martingale},
                          {"all_lifts_G_martingales", eq.all_lifts_are_g_martingales}};
  const auto rows = initial_identities(space, sig);
  j["identities"] = to_json(rows);
  out.identities_pass = all_pass(rows);
  return out;
}

/// Writes to a sibling temp file, then renames over the target.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace enlarge

#endif  // ENLARGE_REPORT_HPP_
