// Exhaustive BFS over all reachable 4-block states, checking the engine
// against the independent flat-set interpreter and the injectivity of
// observation rendering.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "learnact/text_render.hpp"

using namespace learnact;

namespace {

oracle::Atoms all_on_table(const std::vector<std::string>& blocks) {
  oracle::Atoms atoms{oracle::armempty()};
  for (const auto& b : blocks) {
    atoms.insert(oracle::ontable(b));
    atoms.insert(oracle::clear(b));
  }
  return atoms;
}

}  // namespace

TEST_CASE("apply and applicable agree with the flat-set oracle on every reachable 4-block state") {
  std::vector<std::string> blocks{"b1", "b2", "b3", "b4"};
  oracle::FlatBlockworld world(blocks);
  std::vector<oracle::Atoms> reachable = bfs_reachable(world, all_on_table(blocks));
  // 73 table arrangements plus 4 * 13 held-block arrangements.
  CHECK(reachable.size() == 125);

  const DomainDefinition& domain = testkit::blockworld_bundle().domain;
  auto actions = world.all_ground_actions();
  long long checked = 0;
  for (const auto& atoms : reachable) {
    WorldState state = testkit::state_from_atoms(blocks, atoms);
    for (const auto& action : actions) {
      GroundResult grounded = ground(domain, state, action.name, action.args);
      REQUIRE(grounded.ok());
      bool oracle_says = world.applicable(atoms, action);
      bool engine_says = applicable(state, *grounded.action);
      REQUIRE_MESSAGE(engine_says == oracle_says,
                      "applicable mismatch on " << action.text());
      if (!oracle_says) continue;
      WorldState next = apply(state, *grounded.action);
      REQUIRE_MESSAGE(testkit::atoms_from_state(next) == world.apply(atoms, action),
                      "apply mismatch on " << action.text());
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("observation rendering is injective over reachable 3- and 4-block states") {
  auto renderer = ObservationRenderer::for_domain("blockworld");
  for (int n : {3, 4}) {
    std::vector<std::string> blocks;
    for (int i = 1; i <= n; ++i) blocks.push_back("b" + std::to_string(i));
    oracle::FlatBlockworld world(blocks);
    std::vector<oracle::Atoms> reachable = bfs_reachable(world, all_on_table(blocks));
    std::set<std::string> renderings;
    for (const auto& atoms : reachable)
      renderings.insert(renderer->render_state(testkit::state_from_atoms(blocks, atoms)));
    CHECK(renderings.size() == reachable.size());
  }
}
