#include "rawkit/profiles.hpp"

#include <fstream>

#include <json.hpp>

#include "rawkit/error.hpp"

namespace rawkit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

CameraProfile make_profile(const std::string& name, const Ccm& ccm) {
  CameraProfile p;
  p.name = name;
  p.ccm = ccm;
  return p;
}

}  // namespace

const ProfileBank& builtin_profile_bank() {
  static const ProfileBank kBank = [] {
    ProfileBank bank;
    bank.push_back(CameraProfile::identity());
    bank.push_back(make_profile("cam_a", {{{1.66, -0.55, -0.11},
                                           {-0.18, 1.44, -0.26},
                                           {0.01, -0.55, 1.54}}}));
    bank.push_back(make_profile("cam_b", {{{1.52, -0.38, -0.14},
                                           {-0.12, 1.36, -0.24},
                                           {0.03, -0.46, 1.43}}}));
    bank.push_back(make_profile("cam_c", {{{1.79, -0.62, -0.17},
                                           {-0.25, 1.60, -0.35},
                                           {0.00, -0.64, 1.64}}}));
    for (const auto& p : bank) p.validate();
    return bank;
  }();
  return kBank;
}

ProfileBank load_profile_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  if (!doc.is_array()) throw ParseError("'" + path + "': top level must be an array");
  if (doc.empty()) throw ParseError("'" + path + "': profile bank is empty");

  ProfileBank bank;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    std::string where = "profiles[" + std::to_string(i) + "]";
    CameraProfile p;
    try {
      p.name = rec.at("name").get<std::string>();
      const json& ccm = rec.at("ccm");
      if (!ccm.is_array() || ccm.size() != 3)
        throw ParseError(where + ": ccm must be a 3x3 array");
      for (int r = 0; r < 3; ++r) {
        if (!ccm[r].is_array() || ccm[r].size() != 3)
          throw ParseError(where + ": ccm must be a 3x3 array");
        for (int c = 0; c < 3; ++c) p.ccm[r][c] = ccm[r][c].get<double>();
      }
      if (auto it = rec.find("wb_gains"); it != rec.end()) {
        p.wb_gains.r = it->at("r").get<double>();
        p.wb_gains.g = it->at("g").get<double>();
        p.wb_gains.b = it->at("b").get<double>();
      }
      if (auto it = rec.find("gamma"); it != rec.end()) p.gamma = it->get<double>();
      if (auto it = rec.find("black_level"); it != rec.end()) p.black_level = it->get<int>();
      if (auto it = rec.find("white_level"); it != rec.end()) p.white_level = it->get<int>();
      if (auto it = rec.find("safe_wb_threshold"); it != rec.end())
        p.safe_wb_threshold = it->get<double>();
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    try {
      p.validate();
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    bank.push_back(std::move(p));
  }
  return bank;
}

void save_profile_bank(const ProfileBank& bank, const std::string& path) {
  if (bank.empty()) throw ValidationError("refusing to save an empty profile bank");
  ordered_json doc = json::array();
  for (const auto& p : bank) {
    p.validate();
    ordered_json rec;
    rec["name"] = p.name;
    rec["ccm"] = {{p.ccm[0][0], p.ccm[0][1], p.ccm[0][2]},
                  {p.ccm[1][0], p.ccm[1][1], p.ccm[1][2]},
                  {p.ccm[2][0], p.ccm[2][1], p.ccm[2][2]}};
    rec["wb_gains"] = {{"r", p.wb_gains.r}, {"g", p.wb_gains.g}, {"b", p.wb_gains.b}};
    rec["gamma"] = p.gamma;
    rec["black_level"] = p.black_level;
    rec["white_level"] = p.white_level;
    rec["safe_wb_threshold"] = p.safe_wb_threshold;
    doc.push_back(std::move(rec));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace rawkit
