import random

import pytest

from tabfig.errors import EmptyGold, EmptyReference, GroupTooSmall
from tabfig.gateway.embedders import HashEmbedder, MappingEmbedder
from tabfig.metrics.aggregate import MetricVector, aggregate
from tabfig.rewards.breakdown import (
    RewardBreakdown,
    RewardWeights,
    critic_reward,
    expert_reward,
    planner_reward,
    solver_reward,
)
from tabfig.rewards.components import (
    expert_accuracy,
    extract_options,
    format_reward,
    length_reward,
    multichoice_f1,
)
from tabfig.rewards.groups import GroupSample, group_advantages
from tabfig.rewards.preference import improves_strictly, preference_filter
from tabfig.tools.registry import ToolCall

WELL_TAGGED_CRITIC = (
    "<think>t</think><accuracy>2</accuracy><completeness>1</completeness>"
    "<format>2</format><writing>2</writing><faithfulness>2</faithfulness>"
    "<feedback>A B</feedback>"
)


class TestFormatReward:
    def test_well_tagged_planner(self):
        assert format_reward("<think>t</think><plan>* x</plan>", "planner") == 1

    def test_missing_plan_tag(self):
        assert format_reward("<think>t</think>", "planner") == 0

    def test_critic_full_tag_set(self):
        assert format_reward(WELL_TAGGED_CRITIC, "critic") == 1

    def test_critic_missing_feedback(self):
        text = WELL_TAGGED_CRITIC.replace("<feedback>A B</feedback>", "")
        assert format_reward(text, "critic") == 0

    def test_expert_tool_or_summary(self):
        assert format_reward("<think>t</think><tool>arxiv_searcher</tool>", "expert") == 1
        assert format_reward("<think>t</think><summary>s</summary>", "expert") == 1
        assert format_reward("<think>t</think>", "expert") == 0

    def test_solver(self):
        assert format_reward("<think>t</think><answer>a</answer>", "solver") == 1
        assert format_reward("plain text", "solver") == 0


class TestMultichoiceF1:
    def test_exact_equality(self):
        assert multichoice_f1({"A", "B"}, {"A", "B"}) == 1.0

    def test_spec_two_thirds_case(self):
        assert multichoice_f1({"A", "B", "D"}, {"A", "B", "C"}) == pytest.approx(2 / 3, abs=1e-9)

    def test_subset_case(self):
        assert multichoice_f1({"A"}, {"A", "B"}) == pytest.approx(2 / 3, abs=1e-9)

    def test_empty_pred(self):
        assert multichoice_f1(set(), {"A"}) == 0.0

    def test_empty_gold_raises(self):
        with pytest.raises(EmptyGold):
            multichoice_f1({"A"}, set())

    def test_equality_iff_one(self):
        rng = random.Random(21)
        universe = list("ABCDEFGH")
        for _ in range(300):
            pred = set(rng.sample(universe, rng.randint(0, 5)))
            gold = set(rng.sample(universe, rng.randint(1, 5)))
            value = multichoice_f1(pred, gold)
            assert (value == 1.0) == (pred == gold)

    def test_monotone_in_intersection(self):
        # fixed sizes |pred|=3, |gold|=4: more overlap never scores lower
        gold = {"A", "B", "C", "D"}
        preds = [{"E", "F", "G"}, {"A", "F", "G"}, {"A", "B", "G"}, {"A", "B", "C"}]
        values = [multichoice_f1(p, gold) for p in preds]
        assert values == sorted(values)


class TestExpertAccuracy:
    GOLD = ToolCall("arxiv_searcher", {"query": "graph filters", "max_results": 5})

    def test_wrong_tool_is_zero(self):
        call = ToolCall("web_searcher", {"query": "graph filters", "max_results": 5})
        assert expert_accuracy(call, self.GOLD) == 0.0

    def test_full_match(self):
        call = ToolCall("arxiv_searcher", {"query": "Graph  Filters", "max_results": 5})
        assert expert_accuracy(call, self.GOLD) == 1.0  # query matches normalized

    def test_partial_params(self):
        gold = ToolCall(
            "arxiv_searcher",
            {"query": "q", "max_results": 5, "category": "cs.LG", "sort_by": "relevance"},
        )
        call = ToolCall("arxiv_searcher", {"query": "q", "max_results": 3, "category": "cs.LG"})
        assert expert_accuracy(call, gold) == pytest.approx(0.5)

    def test_no_gold_params_vacuous(self):
        assert expert_accuracy(ToolCall("web_searcher", {}), ToolCall("web_searcher", {})) == 1.0


class TestLengthReward:
    def test_lower_boundary_inclusive(self):
        ref = " ".join(["w"] * 100)
        assert length_reward(" ".join(["w"] * 50), ref) == 1

    def test_upper_boundary_inclusive(self):
        ref = " ".join(["w"] * 100)
        assert length_reward(" ".join(["w"] * 150), ref) == 1

    def test_just_outside_band(self):
        ref = " ".join(["w"] * 100)
        assert length_reward(" ".join(["w"] * 151), ref) == 0
        assert length_reward(" ".join(["w"] * 49), ref) == 0

    def test_empty_reference_raises(self):
        with pytest.raises(EmptyReference):
            length_reward("anything", "")


class TestBreakdowns:
    def test_solver_identity_full_reward(self):
        embedder = HashEmbedder(dim=8)
        ref = "the filter wins on every family"
        z = f"<think>t</think><answer>{ref}</answer>"
        breakdown = solver_reward(z, ref, embedder)
        assert breakdown.components == {"format": 1.0, "length": 1.0, "semantic": 1.0}
        assert breakdown.total == pytest.approx(1.0)

    def test_solver_untagged_decomposition(self):
        embedder = HashEmbedder(dim=8)
        ref = "alpha beta gamma delta"
        z = "alpha beta gamma delta"  # in band, unformatted
        b = solver_reward(z, ref, embedder)
        assert b.components["format"] == 0.0
        assert b.total == pytest.approx(
            b.weights["length"] * b.components["length"]
            + b.weights["semantic"] * b.components["semantic"]
        )

    def test_solver_disjoint_tokens_orthogonal_stub(self):
        stub = MappingEmbedder({"aa": [1.0, 0.0], "bb": [0.0, 1.0]})
        z = "<think>t</think><answer>aa</answer>"
        b = solver_reward(z, "bb", stub)
        assert b.components["semantic"] == 0.0
        assert b.total == pytest.approx(b.weights["format"] + b.weights["length"])

    def test_planner_perfect(self):
        z = "<think>t</think><plan>A, B</plan>"
        b = planner_reward(z, {"A", "B"})
        assert b.total == pytest.approx(1.0)

    def test_planner_partial_f1(self):
        z = "<think>t</think><plan>A, B, D</plan>"
        b = planner_reward(z, {"A", "B", "C"}, RewardWeights(planner={"format": 0.5, "accuracy": 0.5}))
        assert b.total == pytest.approx(0.5 + 0.5 * (2 / 3))

    def test_unparseable_scores_zero_everywhere(self):
        b = planner_reward("no tags at all", {"A"})
        assert b.components == {"format": 0.0, "accuracy": 0.0}
        assert b.total == 0.0

    def test_critic_options_from_feedback(self):
        b = critic_reward(WELL_TAGGED_CRITIC, {"A", "B"})
        assert b.components["accuracy"] == 1.0

    def test_expert_reward_matches_components(self):
        z = (
            "<think>t</think><tool>arxiv_searcher</tool>"
            "<query>graph filters</query><max_results>5</max_results>"
        )
        gold = ToolCall("arxiv_searcher", {"query": "graph filters", "max_results": 5})
        b = expert_reward(z, gold)
        assert b.components == {"format": 1.0, "accuracy": 1.0}

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            RewardWeights(solver={"format": 0.5, "length": 0.2, "semantic": 0.5})

    def test_randomized_total_range(self):
        rng = random.Random(22)
        for _ in range(1000):
            w3 = [rng.random() for _ in range(3)]
            s = sum(w3)
            weights = {"format": w3[0] / s, "length": w3[1] / s, "semantic": w3[2] / s}
            components = {"format": rng.random(), "length": rng.random(), "semantic": rng.random()}
            b = RewardBreakdown("solver", components, weights)
            assert 0.0 <= b.total <= 1.0 + 1e-12


class TestGroupAdvantages:
    def test_one_two_three(self):
        adv = group_advantages([1.0, 2.0, 3.0])
        assert adv[0] == pytest.approx(-1.2247, abs=1e-4)
        assert adv[1] == pytest.approx(0.0, abs=1e-12)
        assert adv[2] == pytest.approx(1.2247, abs=1e-4)

    def test_constant_rewards_zero(self):
        assert group_advantages([0.7, 0.7, 0.7]) == [0.0, 0.0, 0.0]

    def test_pair(self):
        adv = group_advantages([0.0, 1.0])
        assert adv[0] == pytest.approx(-1.0, abs=1e-7)
        assert adv[1] == pytest.approx(1.0, abs=1e-7)

    def test_too_small(self):
        with pytest.raises(GroupTooSmall):
            group_advantages([1.0])

    def test_zero_mean_and_unit_variance(self):
        rng = random.Random(23)
        for _ in range(200):
            k = rng.randint(2, 16)
            rewards = [rng.random() for _ in range(k)]
            adv = group_advantages(rewards)
            assert abs(sum(adv) / k) < 1e-9
            if max(rewards) - min(rewards) > 1e-6:
                var = sum(a * a for a in adv) / k
                assert var == pytest.approx(1.0, abs=1e-4)

    def test_shift_invariance(self):
        rewards = [0.2, 0.5, 0.9, 0.4]
        base = group_advantages(rewards)
        shifted = group_advantages([r + 10.0 for r in rewards])
        for a, b in zip(base, shifted):
            assert a == pytest.approx(b, abs=1e-6)

    def test_positive_scale_invariance(self):
        rewards = [0.2, 0.5, 0.9, 0.4]
        base = group_advantages(rewards)
        scaled = group_advantages([3.0 * r for r in rewards])
        for a, b in zip(base, scaled):
            assert a == pytest.approx(b, abs=1e-6)

    def test_group_sample_wrapper(self):
        group = GroupSample(actions=["x", "y"], rewards=[0.0, 1.0])
        assert len(group.advantages) == 2


def report_with(s_lex, s_sem, s_avg):
    vec = MetricVector(0.1, 0.1, 0.1, 0.1, 0.1, 0.1)
    report = aggregate([vec])
    report.s_lex, report.s_sem, report.s_avg = s_lex, s_sem, s_avg
    return report


class TestPreferenceFilter:
    def test_strict_improvement_required(self):
        baseline = report_with(10.0, 20.0, 15.0)
        assert improves_strictly(report_with(10.5, 21.0, 15.5), baseline)
        assert not improves_strictly(report_with(10.5, 21.0, 15.0), baseline)  # tie on avg
        assert not improves_strictly(report_with(9.0, 21.0, 15.5), baseline)

    def test_kept_set_matches_hand_computation(self):
        baseline = report_with(10.0, 20.0, 15.0)
        outcomes = {
            "better": report_with(11.0, 21.0, 16.0),
            "tie_avg": report_with(11.0, 21.0, 15.0),
            "worse_lex": report_with(9.0, 21.0, 16.0),
            "all_worse": report_with(5.0, 5.0, 5.0),
        }

        def run(name):
            if name == "crashes":
                raise RuntimeError("pipeline failed")
            return outcomes[name]

        result = preference_filter(
            ["better", "tie_avg", "worse_lex", "all_worse", "crashes"], run, baseline
        )
        assert result.kept == ["better"]
        assert set(result.dropped) == {"tie_avg", "worse_lex", "all_worse"}
        assert result.failed == ["crashes"]
        assert result.counts == {"kept": 1, "dropped": 3, "failed": 1}


class TestOptionExtraction:
    def test_letters_and_numbers(self):
        assert extract_options("<plan>Pick A and C</plan>", "plan") == {"A", "C"}
        assert extract_options("<feedback>2, 4</feedback>", "feedback") == {"2", "4"}

    def test_missing_tag_is_none(self):
        assert extract_options("no tags", "plan") is None


def test_preference_dataset_emission(tmp_path):
    import json

    from tabfig.rewards.preference import write_preference_dataset

    path = tmp_path / "prefs.jsonl"
    write_preference_dataset(
        path,
        [
            {
                "prompt": "pick the best plan",
                "options": {"A": "plan one", "B": "plan two"},
                "gold_option_ids": {"B"},
                "provenance": "reference planner, validated end to end",
            }
        ],
    )
    rows = [json.loads(l) for l in path.read_text().splitlines()]
    assert rows == [
        {
            "prompt": "pick the best plan",
            "options": {"A": "plan one", "B": "plan two"},
            "gold_option_ids": ["B"],
            "provenance": "reference planner, validated end to end",
        }
    ]
