import pytest

from tabfig.agents.orchestrator import PipelineConfig, run_pipeline
from tabfig.agents.prompts import render_exemplars, render_planner, render_solver
from tabfig.gateway.backends import BackendSpec
from tabfig.tools.registry import ToolEnv

from .matrix import FEEDBACK_TEXT, make_script, scenario_matrix, scripted_pipeline


@pytest.fixture()
def run_env(latex_doc, xml_doc):
    return ToolEnv(documents={latex_doc.paper_id: latex_doc, xml_doc.paper_id: xml_doc})


def run_scripted(instance, run_env, script, variant="anagent_critic", **config_kw):
    config, gateway = scripted_pipeline(script, variant=variant, **config_kw)
    return run_pipeline(instance, config, gateway, run_env), config, gateway


class TestPlanStage:
    def test_three_bullets_become_subtasks(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script())
        assert len(transcript.plan.subtasks) == 3
        assert transcript.plan.subtasks[0] == "gather context"

    def test_missing_plan_twice_degrades(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script(plan="missing"))
        assert "plan_failure" in transcript.flags
        assert transcript.plan.subtasks == [""]
        assert transcript.final  # pipeline still completes

    def test_k_shot_renders_exactly_one_exemplar(self, instance):
        pool = [
            {"agent": "planner", "problem": "P1", "response": "R1"},
            {"agent": "planner", "problem": "P2", "response": "R2"},
            {"agent": "solver", "problem": "P3", "response": "R3"},
        ]
        backend = BackendSpec(name="default", endpoint="mock://chat", model_id="s")
        config = PipelineConfig(backends={"default": backend}, k_shot=1, exemplar_pool=pool)
        prompt = render_planner(instance, config, render_exemplars(pool, "planner", 1))
        assert prompt.count("**Example 1**") == 1
        assert "**Example 2**" not in prompt
        assert "R1" in prompt and "R3" not in prompt

    def test_zero_shot_has_no_exemplar_block(self, instance):
        backend = BackendSpec(name="default", endpoint="mock://chat", model_id="s")
        config = PipelineConfig(backends={"default": backend})
        prompt = render_planner(instance, config, "")
        assert "**Example" not in prompt


class TestExpertLoop:
    def test_tool_then_summary(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script())
        assert len(transcript.expert_turns) == 2
        first, second = transcript.expert_turns
        assert first.tool_call.tool_name == "information_localizer"
        assert first.tool_result.status == "ok"
        assert second.summary == "collected knowledge summary"
        assert transcript.knowledge.summary == "collected knowledge summary"

    def test_turn_exhaustion_forces_summary_within_budget(self, instance, run_env):
        script = make_script(expert=("tool",) * 5)
        transcript, config, _ = run_scripted(instance, run_env, script)
        assert len(transcript.expert_turns) == 5
        assert transcript.knowledge.summary == "forced summary of findings"
        # the forced summary is the fifth turn's second message, not a sixth turn
        expert_calls = config.max_expert_turns
        assert transcript.model_call_count <= config.turn_budget
        assert transcript.request_count > transcript.model_call_count  # extra message happened
        assert len([t for t in transcript.expert_turns if t.tool_call]) == expert_calls

    def test_invalid_params_recorded_and_loop_continues(self, instance, run_env):
        script = make_script(expert=("bad_params", "summary"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        first = transcript.expert_turns[0]
        assert first.tool_result.status == "error"
        assert first.tool_result.error_kind == "schema_violation"
        assert "type:max_results" in first.tool_result.payload
        assert transcript.knowledge.summary == "collected knowledge summary"

    def test_unknown_tool_is_error_entry(self, instance, run_env):
        script = make_script(expert=("unknown_tool", "summary"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        assert transcript.expert_turns[0].tool_result.error_kind == "schema_violation"

    def test_tool_runtime_error_becomes_knowledge_entry(self, instance, run_env):
        script = make_script(expert=("tool_error", "summary"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        entry = transcript.knowledge.entries[0]
        assert entry.is_error
        assert "network_failure" in entry.content

    def test_garbage_turn_repaired_or_recorded(self, instance, run_env):
        script = make_script(expert=("garbage", "garbage", "summary"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        assert transcript.expert_turns[0].error == "unparseable"
        assert transcript.knowledge.summary == "collected knowledge summary"

    def test_knowledge_monotone(self, instance, run_env):
        script = make_script(expert=("tool", "bad_params", "tool_error", "summary"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        sizes = transcript.knowledge_sizes
        assert sizes == sorted(sizes)
        assert sizes[-1] == len(transcript.knowledge.entries)


class TestSolveCritiqueLoop:
    def test_scripted_answer_captured(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script())
        assert transcript.solutions[0].startswith("analysis draft v1")

    def test_feedback_forwarded_verbatim(self, instance, run_env):
        script = make_script(critic=("feedback",), solver=("ok", "ok"))
        transcript, config, gateway = run_scripted(instance, run_env, script)
        assert len(transcript.solutions) == 2
        assert transcript.critiques[0].feedback == FEEDBACK_TEXT
        second_solve_prompt = [
            entry["turns"][-1]
            for entry in gateway.mock_log
            if "writes high-quality scientific analysis" in entry["turns"][-1][:400]
        ][1]
        assert FEEDBACK_TEXT in second_solve_prompt

    def test_perfect_grades_stop_early(self, instance, run_env):
        script = make_script(critic=("perfect",), solver=("ok", "ok"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        assert len(transcript.solutions) == 1
        assert transcript.critiques[0].perfect()

    def test_out_of_range_grade_clamped_and_flagged(self, instance, run_env):
        script = make_script(critic=("clamp",), solver=("ok", "ok"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        report = transcript.critiques[0]
        assert report.grades["accuracy"] == 2
        assert report.clamped

    def test_critic_failure_keeps_current_solution(self, instance, run_env):
        script = make_script(critic=("garbage", "garbage"), solver=("ok", "ok"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        assert "critique_failure" in transcript.flags
        assert transcript.critiques == []
        assert len(transcript.solutions) == 1

    def test_unparseable_answer_twice_flagged(self, instance, run_env):
        script = make_script(solver=("garbage", "garbage"), critic=("perfect",))
        transcript, _, _ = run_scripted(instance, run_env, script)
        assert "solution_unparsed" in transcript.flags
        assert "rambling answer" in transcript.solutions[0]

    def test_final_is_last_solution(self, instance, run_env):
        script = make_script(critic=("feedback",), solver=("ok", "ok"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        assert transcript.final == transcript.solutions[-1]


class TestVariants:
    def test_baseline_is_single_solve(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script(), variant="baseline")
        assert transcript.plan is None
        assert transcript.expert_turns == []
        assert transcript.critiques == []
        assert len(transcript.solutions) == 1

    def test_omnion_has_tools_but_no_plan_or_expert_stage(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script(), variant="omnion")
        assert transcript.plan is None
        assert transcript.critiques == []
        # tool turns exist but belong to the tool-equipped writing agent
        assert any(t.tool_call for t in transcript.expert_turns) or transcript.knowledge.summary

    def test_symnion_has_expert_but_no_planner(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script(), variant="symnion")
        assert transcript.plan is None
        assert transcript.expert_turns
        assert transcript.critiques == []

    def test_anagent_without_critic_single_solve(self, instance, run_env):
        transcript, _, _ = run_scripted(instance, run_env, make_script(), variant="anagent")
        assert transcript.plan is not None
        assert transcript.critiques == []
        assert len(transcript.solutions) == 1

    def test_anagent_critic_full_stack(self, instance, run_env):
        script = make_script(critic=("feedback",), solver=("ok", "ok"))
        transcript, _, _ = run_scripted(instance, run_env, script)
        assert transcript.plan is not None
        assert transcript.expert_turns
        assert transcript.critiques
        assert len(transcript.solutions) == 2

    def test_critic_disabled_via_turns(self, instance, run_env):
        script = make_script()
        transcript, _, _ = run_scripted(
            instance, run_env, script, variant="anagent_critic", max_critic_turns=0
        )
        assert transcript.critiques == []
        assert len(transcript.solutions) == 1


class TestScenarioMatrix:
    def test_fifty_scenarios_bounded_and_monotone(self, instance, run_env):
        scenarios = scenario_matrix(50)
        assert len(scenarios) == 50
        for scenario in scenarios:
            script = make_script(
                plan=scenario["plan"],
                expert=scenario["expert"],
                solver=scenario["solver"],
                critic=scenario["critic"],
                forced_summary=scenario["forced_summary"],
            )
            config, gateway = scripted_pipeline(script, variant=scenario["variant"])
            transcript = run_pipeline(instance, config, gateway, run_env)
            budget = config.turn_budget
            assert transcript.model_call_count <= budget <= 9
            assert transcript.knowledge_sizes == sorted(transcript.knowledge_sizes)
            assert transcript.solutions
            assert transcript.final == transcript.solutions[-1]


class TestContextOverflow:
    def test_prompt_shrunk_and_retried(self, instance, run_env):
        from tabfig.errors import ContextOverflow

        inner = make_script()
        state = {"first": True}

        def overflowing(turns, params):
            if state["first"]:
                state["first"] = False
                raise ContextOverflow("maximum context length exceeded")
            return inner(turns, params)

        transcript, _, _ = run_scripted(instance, run_env, overflowing)
        assert transcript.final
        assert "planner_context_truncated" in transcript.flags

    def test_unshrinkable_prompt_propagates(self, instance, run_env):
        from tabfig.errors import ContextOverflow

        def always_overflows(turns, params):
            raise ContextOverflow("context window exceeded")

        config, gateway = scripted_pipeline(always_overflows)
        with pytest.raises(ContextOverflow):
            from tabfig.agents.orchestrator import run_pipeline as rp

            rp(instance, config, gateway, run_env)


class TestPromptDeterminism:
    def test_identical_inputs_render_identical_prompts(self, instance):
        backend = BackendSpec(name="default", endpoint="mock://chat", model_id="s")
        config = PipelineConfig(backends={"default": backend}, requirements={"width": "internal"})
        a = render_solver(instance, config, "* plan", "knowledge", None)
        b = render_solver(instance, config, "* plan", "knowledge", None)
        assert a == b

    def test_requirement_sentences_appended(self, instance):
        backend = BackendSpec(name="default", endpoint="mock://chat", model_id="s")
        config = PipelineConfig(
            backends={"default": backend},
            requirements={"length_target": 120, "width": "mixed", "depth": "in_depth"},
        )
        prompt = render_planner(instance, config, "")
        assert "around 120 tokens" in prompt
        assert "both within and outside" in prompt
        assert "evidence-grounded inference" in prompt

    def test_requirements_off_by_default(self, instance):
        backend = BackendSpec(name="default", endpoint="mock://chat", model_id="s")
        config = PipelineConfig(backends={"default": backend})
        assert "around 120 tokens" not in render_planner(instance, config, "")
