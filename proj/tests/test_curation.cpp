#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "kernelcur/curation.hpp"
#include "kernelcur/error.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/tmpdir.hpp"

using namespace kernelcur;
using namespace kernelcur::curation;
using testing_support::make_item;

namespace {

TaskGroup group_of(const std::string& id, TaskType type,
                   const std::vector<std::tuple<std::int64_t, bool, double>>& gens) {
    TaskGroup g;
    g.task_id = id;
    g.task_type = type;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto& [len, ok, s] = gens[i];
        g.items.push_back(make_item(id, static_cast<std::int64_t>(i), type, len, ok, s));
    }
    return g;
}

std::set<RecordKey> keys_of(const std::vector<CuratedSample>& samples) {
    std::set<RecordKey> out;
    for (const auto& s : samples) out.insert(s.key());
    return out;
}

}  // namespace

TEST(PartA, ShortestAndFastest) {
    const auto g = group_of("t", TaskType::multi_op,
                            {{3000, true, 2.1}, {5000, true, 1.0}, {7000, false, 0.0}});
    const auto a = select_part_a(g);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(a->gen_index, 0);
    EXPECT_EQ(a->part, Part::A_short_and_fast);
}

TEST(PartA, ShortestIncorrectEmitsNothing) {
    const auto g = group_of("t", TaskType::multi_op, {{1000, false, 0.0}, {5000, true, 1.5}});
    EXPECT_FALSE(select_part_a(g).has_value());
}

TEST(PartA, AllIncorrectEmitsNothing) {
    std::vector<std::tuple<std::int64_t, bool, double>> gens(5, {1000, false, 0.0});
    EXPECT_FALSE(select_part_a(group_of("t", TaskType::multi_op, gens)).has_value());
}

TEST(PartA, TiesFavorEmissionAndLowestIndex) {
    const auto tie_speed = group_of("t", TaskType::multi_op, {{2000, true, 2.0}, {1000, true, 2.0}});
    const auto a = select_part_a(tie_speed);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->gen_index, 1);
    const auto tie_len = group_of("t", TaskType::multi_op, {{1000, true, 2.0}, {1000, true, 2.0}});
    EXPECT_EQ(select_part_a(tie_len)->gen_index, 0);
    // The first of two equally short generations is the one judged.
    const auto first_wrong = group_of("t", TaskType::multi_op, {{1000, false, 0.0}, {1000, true, 2.0}});
    EXPECT_FALSE(select_part_a(first_wrong));
}

TEST(PartB, StrictThreshold) {
    const auto g = group_of("t", TaskType::multi_op, {{1, true, 6.2}, {1, true, 5.0}, {1, true, 4.9}});
    const auto b = select_part_b({g}, 5.0);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_DOUBLE_EQ(b[0].speedup, 6.2);
    EXPECT_THROW(select_part_b({g}, 0.0), DomainError);
}

TEST(PartB, SkipsAlreadyTakenAndAdmitsSeveralPerTask) {
    const auto g = group_of("t", TaskType::multi_op, {{1, true, 7.0}, {2, true, 8.0}, {3, true, 9.0}});
    const auto b = select_part_b({g}, 5.0, {{"t", 0}});
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].gen_index, 1);
    EXPECT_EQ(b[1].gen_index, 2);
}

TEST(PartB, InvariantToGroupOrder) {
    auto groups = testing_support::make_groups({.n_tasks = 60});
    const auto base = select_part_b(groups, 5.0);
    std::mt19937 rng(1);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(groups.begin(), groups.end(), rng);
        EXPECT_EQ(select_part_b(groups, 5.0), base);
    }
}

TEST(PartC, SortsAndTruncates) {
    std::vector<TaskGroup> groups{
        group_of("a", TaskType::single_op, {{1, true, 1.4}}),
        group_of("b", TaskType::single_op, {{1, true, 0.9}}),
        group_of("c", TaskType::single_op, {{1, true, 2.0}}),
        group_of("d", TaskType::multi_op, {{1, true, 9.0}}),
    };
    const auto two = select_part_c(groups, {}, 2);
    ASSERT_EQ(two.samples.size(), 2u);
    EXPECT_EQ(two.samples[0].task_id, "c");
    EXPECT_EQ(two.samples[1].task_id, "a");
    EXPECT_EQ(select_part_c(groups, {}, 0).samples.size(), 3u);
}

TEST(PartC, SkipsRepresentedTasksAndCountsUnknown) {
    std::vector<TaskGroup> groups{
        group_of("a", TaskType::single_op, {{1, true, 1.4}, {2, true, 1.1}}),
        group_of("b", TaskType::unknown, {{1, true, 3.0}}),
    };
    const auto c = select_part_c(groups, {{"a", 0}}, 0);
    EXPECT_TRUE(c.samples.empty());
    EXPECT_EQ(c.n_unknown_skipped, 1);
}

TEST(PartC, BestPerTaskBreaksTiesByLength) {
    std::vector<TaskGroup> groups{
        group_of("a", TaskType::single_op, {{500, true, 2.0}, {300, true, 2.0}, {100, true, 1.0}})};
    const auto c = select_part_c(groups, {}, 0);
    ASSERT_EQ(c.samples.size(), 1u);
    EXPECT_EQ(c.samples[0].gen_index, 1);
}

TEST(Curate, FiveTaskFixture) {
    const auto result = curate(testing_support::five_task_fixture(), {});
    EXPECT_EQ(result.tallies, (PartTallies{2, 1, 1}));
    ASSERT_EQ(result.samples.size(), 4u);
    EXPECT_EQ(keys_of(result.samples).size(), 4u);
    EXPECT_EQ(result.samples[0].key(), (RecordKey{"t1", 0}));
    EXPECT_EQ(result.samples[1].key(), (RecordKey{"t2", 0}));
    EXPECT_EQ(result.samples[2].key(), (RecordKey{"t3", 1}));
    EXPECT_EQ(result.samples[3].key(), (RecordKey{"t4", 0}));
    EXPECT_EQ(result.samples[3].part, Part::C_single_op_balance);
}

TEST(Curate, MatchesStraightLineOracle) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto groups = testing_support::make_groups(
            {.n_tasks = 80, .gens_per_task = 5, .seed = seed, .coarse_lengths = seed % 2 == 0});
        for (std::int64_t target : {0, 3}) {
            CurationConfig cfg;
            cfg.single_op_target = target;
            const auto got = curate(groups, cfg);
            auto want = oracle::curate_concur(groups, 5.0, target);
            std::vector<std::tuple<char, std::string, std::int64_t>> a, b;
            for (const auto& s : got.samples) {
                a.emplace_back(static_cast<char>('A' + static_cast<int>(*s.part)), s.task_id, s.gen_index);
            }
            for (const auto& p : want) b.emplace_back(p.part, p.task_id, p.gen_index);
            std::sort(b.begin(), b.end());
            EXPECT_EQ(a, b) << "seed " << seed;
        }
    }
}

TEST(Curate, PartsDisjointAndSamplesSelectable) {
    const auto groups = testing_support::make_groups({.n_tasks = 200, .seed = 77});
    const auto result = curate(groups, {});
    EXPECT_EQ(static_cast<std::int64_t>(result.samples.size()),
              result.tallies.a + result.tallies.b + result.tallies.c);
    EXPECT_EQ(keys_of(result.samples).size(), result.samples.size());
    std::map<RecordKey, const TaskGroupItem*> index;
    for (const auto& g : groups)
        for (const auto& it : g.items) index[it.record.key()] = &it;
    for (const auto& s : result.samples) {
        EXPECT_EQ(index.at(s.key())->eval.status, Status::correct);
        EXPECT_GT(index.at(s.key())->eval.speedup, 0.0);
    }
}

TEST(Ablation, MinLenExample) {
    std::vector<TaskGroup> groups{
        group_of("a", TaskType::multi_op, {{1300, true, 1.0}, {800, false, 0.0}}),
        group_of("b", TaskType::multi_op, {{900, true, 1.0}, {2000, true, 1.0}}),
        group_of("c", TaskType::multi_op, {{1500, true, 1.0}, {1100, true, 1.0}}),
    };
    CurationConfig cfg;
    cfg.policy = Policy::min_len;
    cfg.target_size = 2;
    const auto result = curate(groups, cfg);
    ASSERT_EQ(result.samples.size(), 2u);
    EXPECT_EQ(result.samples[0].key(), (RecordKey{"b", 0}));
    EXPECT_EQ(result.samples[1].key(), (RecordKey{"c", 1}));
    EXPECT_FALSE(result.samples[0].part.has_value());
    EXPECT_TRUE(result.warnings.empty());
}

TEST(Ablation, TargetClampsWithWarning) {
    CurationConfig cfg;
    cfg.policy = Policy::max_len;
    const auto result = curate(testing_support::five_task_fixture(), cfg);
    EXPECT_EQ(result.samples.size(), 4u);
    EXPECT_EQ(result.warnings.size(), 1u);
}

TEST(Ablation, PerTaskExtremal) {
    const auto groups = testing_support::make_groups({.n_tasks = 120, .seed = 5});
    std::map<std::string, const TaskGroup*> by_id;
    for (const auto& g : groups) by_id[g.task_id] = &g;
    for (Policy policy : {Policy::min_len, Policy::max_len, Policy::speedup_first}) {
        CurationConfig cfg;
        cfg.policy = policy;
        cfg.target_size = 40;
        const auto result = curate(groups, cfg);
        ASSERT_EQ(result.samples.size(), 40u);
        for (const auto& s : result.samples) {
            for (const auto& it : by_id.at(s.task_id)->items) {
                if (it.eval.status != Status::correct) continue;
                if (policy == Policy::min_len) EXPECT_GE(it.record.reasoning_tokens, s.reasoning_tokens);
                if (policy == Policy::max_len) EXPECT_LE(it.record.reasoning_tokens, s.reasoning_tokens);
                if (policy == Policy::speedup_first) EXPECT_LE(it.eval.speedup, s.speedup);
            }
        }
    }
}

TEST(Ablation, RandomIsSeedDeterministic) {
    const auto groups = testing_support::make_groups({.n_tasks = 150, .seed = 3});
    CurationConfig cfg;
    cfg.policy = Policy::random;
    cfg.target_size = 30;
    cfg.seed = 1234;
    const auto a = format_curated(curate(groups, cfg), cfg);
    const auto b = format_curated(curate(groups, cfg), cfg);
    EXPECT_EQ(a, b);
    cfg.seed = 99;
    EXPECT_NE(format_curated(curate(groups, cfg), cfg), a);
}

TEST(Heuristic, CountsDistinctOperators) {
    EXPECT_EQ(classify_task_type_heuristic("return torch.matmul(a, b)"), TaskType::single_op);
    EXPECT_EQ(classify_task_type_heuristic("x = torch.randn(4)\nreturn F.relu(x)"),
              TaskType::single_op);
    EXPECT_EQ(classify_task_type_heuristic("y = self.conv(x)\nreturn torch.relu(torch.matmul(y, y))"),
              TaskType::multi_op);
    EXPECT_EQ(classify_task_type_heuristic("return x + y"), TaskType::unknown);
}

TEST(CuratedFile, RoundTrip) {
    testing_support::TempDir dir;
    CurationConfig cfg;
    const auto result = curate(testing_support::five_task_fixture(), cfg);
    write_curated(dir / "c.jsonl", result, cfg);
    const auto file = read_curated(dir / "c.jsonl");
    EXPECT_EQ(file.samples, result.samples);
    EXPECT_EQ(file.header["tallies"]["A"], 2);
    EXPECT_EQ(file.header["tallies"]["B"], 1);
    EXPECT_EQ(file.header["tallies"]["C"], 1);
}

TEST(CurationConfig, Validate) {
    CurationConfig cfg;
    cfg.speedup_threshold = 0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = {};
    cfg.target_size = 0;
    EXPECT_THROW(cfg.validate(), DomainError);
}
