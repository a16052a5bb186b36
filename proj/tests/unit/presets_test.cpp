#include <algorithm>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "qdr/error.hpp"
#include "qdr/presets.hpp"
#include "qdr/response.hpp"

namespace qdr {
namespace {

std::string read_text(const char* path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Presets, CatalogIsComplete) {
  const std::vector<std::string> expected{"2a", "2b", "3a", "3b", "4a", "4b", "5a", "5b", "5c", "6a",
                                          "6b", "6c", "6d", "7a", "7b", "8a", "8b", "9a", "9b"};
  EXPECT_EQ(figure_ids(), expected);
}

TEST(Presets, EmbeddedTableMatchesShippedFile) { EXPECT_EQ(preset_table_text(), read_text(QDR_PRESETS_TXT)); }

TEST(Presets, UnknownFigure) {
  try {
    figure_preset("10");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFigure);
  }
}

TEST(Presets, CaptionValues) {
  const FigurePreset& f4 = figure_preset("4b");
  EXPECT_EQ(f4.params.ep0, 3.15);
  EXPECT_EQ(f4.params.g0, 1.5);
  EXPECT_EQ(f4.params.eta, 0.02);
  EXPECT_EQ(f4.params.omega_k0, 10.0);
  EXPECT_EQ(f4.params.kappa_c0, 1.35);
  EXPECT_EQ(f4.axis, SweepAxis::Delta0);

  const FigurePreset& f2 = figure_preset("2b");
  EXPECT_EQ(f2.params.delta_c0, 0.8);
  EXPECT_EQ(f2.params.delta_p0, -8.0);
  EXPECT_EQ(f2.policy, BranchPolicy::Continuation);

  const FigurePreset& f9 = figure_preset("9b");
  ASSERT_TRUE(f9.family.has_value());
  EXPECT_EQ(f9.family->key, "omega_k0");
  EXPECT_EQ(f9.family->values, (std::vector<double>{10, 8, 5}));
  EXPECT_FALSE(f9.family->assumed);
  const auto members = f9.members();
  ASSERT_EQ(members.size(), 3U);
  EXPECT_EQ(members[2].omega_k0, 5.0);
  EXPECT_EQ(members[2].ep0, 0.54);
}

TEST(Presets, GapsAreMarkedAssumed) {
  for (const FigurePreset& f : figure_presets()) {
    EXPECT_NE(std::find(f.assumed_keys.begin(), f.assumed_keys.end(), "gamma_q0"), f.assumed_keys.end()) << f.id;
    for (const auto& k : f.assumed_keys)
      EXPECT_EQ(std::find(f.caption_keys.begin(), f.caption_keys.end(), k), f.caption_keys.end()) << f.id << " " << k;
  }
  const auto& f4 = figure_preset("4a");
  EXPECT_EQ(f4.assumed_keys, (std::vector<std::string>{"delta_p0", "delta_c0", "gamma_q0"}));
  EXPECT_TRUE(figure_preset("3b").family->assumed);
  EXPECT_TRUE(figure_preset("7b").family->assumed);
  EXPECT_FALSE(figure_preset("2a").family->assumed);
}

TEST(Presets, ParserReportsBadLines) {
  EXPECT_THROW(parse_presets("[x]\nparams = ep0=1\n"), Error);  // no grid
  EXPECT_THROW(parse_presets("params = ep0=1\n"), Error);
  EXPECT_THROW(parse_presets("[x]\ngrid = 0:1:3\nparams = nope=1\n"), Error);
  EXPECT_THROW(parse_presets("[x]\ngrid = 0:1:3\ncolour = red\n"), Error);
  EXPECT_THROW(parse_presets("[x]\ngrid = 0:1:3\n[x]\ngrid = 0:1:3\n"), Error);
  const auto ok = parse_presets("# c\n[x]\ntitle = t\ngrid = 0:1:3\nfamily = g0 1 2 ASSUMED\n");
  ASSERT_EQ(ok.size(), 1U);
  EXPECT_TRUE(ok[0].family->assumed);
}

TEST(Presets, CorrectionTableMatchesToggles) {
  const auto j = nlohmann::json::parse(read_text(QDR_CORRECTIONS_JSON));
  std::vector<std::string> ids;
  for (const auto& c : j["corrections"]) ids.push_back(c["id"]);
  const auto toggles = ClosedFormCorrections::ids();
  ASSERT_EQ(ids.size(), toggles.size());
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], toggles[i]);
}

}  // namespace
}  // namespace qdr
