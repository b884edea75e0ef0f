"""CLI contract: subcommand output, exit codes, and report files."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from ivy.cli import main as cli_main
from tests.conftest import FIXTURES

RIVER = str(FIXTURES / "river.tmk.json")
MINIMAL = str(FIXTURES / "minimal.tmk.json")

REFINED_ANSWER = (
    "In the river crossing problem, the guards are individuals who need to "
    "be transported across the river. They play a crucial role in ensuring "
    "that the prisoners do not escape during the crossing."
)


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, tmp_path, *args):
    return runner.invoke(cli_main, [*args, "--storage", str(tmp_path / "store")])


class TestValidate:
    def test_valid_model(self, runner):
        result = runner.invoke(cli_main, ["validate", RIVER])
        assert result.exit_code == 0
        assert "ok: river (1 tasks, 1 methods, 4 knowledge entities)" in result.output

    def test_invalid_model(self, runner, tmp_path):
        data = json.loads((FIXTURES / "river.tmk.json").read_text())
        data["methods"][0]["task_ref"] = "ghost"
        path = tmp_path / "bad.tmk.json"
        path.write_text(json.dumps(data))
        result = runner.invoke(cli_main, ["validate", str(path)])
        assert result.exit_code == 1
        assert "error:" in result.output
        assert "ghost" in result.output

    def test_unreadable_json(self, runner, tmp_path):
        path = tmp_path / "broken.tmk.json"
        path.write_text("{broken")
        result = runner.invoke(cli_main, ["validate", str(path)])
        assert result.exit_code == 1

    def test_missing_file_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(cli_main, ["validate", str(tmp_path / "absent.json")])
        assert result.exit_code == 2


class TestAsk:
    def test_worked_example_plain(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "ask", "--model", RIVER,
                        "--question", "Who is a guard?")
        assert result.exit_code == 0
        assert REFINED_ANSWER in result.output
        assert "category: KnowledgeModel (k=2)" in result.output
        assert "river/Knowledge/guards" in result.output

    def test_json_output_shape(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "ask", "--model", RIVER,
                        "--question", "Who is a guard?", "--json")
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["text"] == REFINED_ANSWER
        assert body["model_id"] == "river"
        assert body["session_id"] is None

    def test_episodic_persists_trace(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "ask", "--model", RIVER,
                        "--question", "How do I transport everyone across the river?",
                        "--json")
        assert result.exit_code == 0
        trace_id = json.loads(result.output)["trace_id"]
        assert (tmp_path / "store" / "traces" / f"{trace_id}.json").exists()

    def test_empty_question_is_usage_error(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "ask", "--model", RIVER, "--question", "  ")
        assert result.exit_code == 2

    def test_missing_flags_exit_2(self, runner):
        result = runner.invoke(cli_main, ["ask", "--model", RIVER])
        assert result.exit_code == 2

    def test_remote_without_config_exit_2(self, runner, tmp_path):
        result = runner.invoke(
            cli_main,
            ["ask", "--model", RIVER, "--question", "Who is a guard?",
             "--provider", "remote", "--storage", str(tmp_path)],
            env={"IVY_LLM_BASE_URL": None, "IVY_LLM_MODEL": None},
        )
        assert result.exit_code == 2
        assert "IVY_LLM_BASE_URL" in result.output

    def test_unreachable_remote_exit_3(self, runner, tmp_path):
        result = runner.invoke(
            cli_main,
            ["ask", "--model", RIVER, "--question", "Who is a guard?",
             "--provider", "remote", "--storage", str(tmp_path)],
            env={"IVY_LLM_BASE_URL": "http://127.0.0.1:9",
                 "IVY_LLM_MODEL": "test-model"},
        )
        assert result.exit_code == 3
        assert "error:" in result.output


class TestSimulate:
    def test_plain_summary(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "simulate", "--model", RIVER,
                        "--task", "transport")
        assert result.exit_code == 0
        assert "trace saved:" in result.output
        assert result.output.rstrip("\n").endswith("Outcome: reached_end")
        assert "right_guards=3" in result.output
        assert "right_prisoners=3" in result.output

    def test_custom_initial_state(self, runner, tmp_path):
        initial = {
            "left_guards": 1, "left_prisoners": 1,
            "right_guards": 0, "right_prisoners": 0,
            "boat_side": "left", "all_across": False,
        }
        path = tmp_path / "init.json"
        path.write_text(json.dumps(initial))
        result = invoke(runner, tmp_path, "simulate", "--model", RIVER,
                        "--task", "transport", "--init", str(path), "--json")
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["outcome"] == "reached_end"
        assert body["events"][0]["world_state"]["left_guards"] == 1

    def test_unknown_task_exit_1(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "simulate", "--model", RIVER,
                        "--task", "ghost")
        assert result.exit_code == 1
        assert "ghost" in result.output

    def test_missing_initial_exit_1(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "simulate", "--model", MINIMAL,
                        "--task", "noop")
        assert result.exit_code == 1

    def test_bad_limit_exit_2(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "simulate", "--model", RIVER,
                        "--task", "transport", "--limit", "0")
        assert result.exit_code == 2


class TestDocs:
    def test_plain_listing(self, runner):
        result = runner.invoke(cli_main, ["docs", "--model", RIVER])
        assert result.exit_code == 0
        assert "=== river/Knowledge/guards (Knowledge) ===" in result.output
        assert "Guard Definition" in result.output

    def test_json_listing(self, runner):
        result = runner.invoke(cli_main, ["docs", "--model", RIVER, "--json"])
        docs = json.loads(result.output)
        assert len(docs) == 6
        assert {d["category"] for d in docs} == {"Knowledge", "Task", "Method"}


class TestEval:
    def test_report_files_written(self, runner, tmp_path):
        questions = tmp_path / "q.txt"
        questions.write_text("Who is a guard?\nWhat are the prisoners?\n")
        out = tmp_path / "report"
        result = runner.invoke(cli_main, [
            "eval", "--model", RIVER, "--questions", str(questions),
            "--out", str(out), "--runs", "2",
        ])
        assert result.exit_code == 0
        assert "Who is a guard?" in result.output
        for name in ("report.json", "report.csv", "bands.png", "fractions.png"):
            assert (out / name).exists()
        report = json.loads((out / "report.json").read_text())
        assert len(report["results"]) == 2

    def test_bad_runs_exit_2(self, runner, tmp_path):
        questions = tmp_path / "q.txt"
        questions.write_text("Who is a guard?\n")
        result = runner.invoke(cli_main, [
            "eval", "--model", RIVER, "--questions", str(questions),
            "--out", str(tmp_path / "r"), "--runs", "1",
        ])
        assert result.exit_code == 2

    def test_empty_corpus_exit_2(self, runner, tmp_path):
        questions = tmp_path / "q.txt"
        questions.write_text("# only comments\n")
        result = runner.invoke(cli_main, [
            "eval", "--model", RIVER, "--questions", str(questions),
            "--out", str(tmp_path / "r"),
        ])
        assert result.exit_code == 2


class TestGroup:
    def test_help_lists_subcommands(self, runner):
        result = runner.invoke(cli_main, ["--help"])
        for name in ("validate", "ask", "simulate", "docs", "eval", "serve"):
            assert name in result.output

    def test_unknown_subcommand_exit_2(self, runner):
        result = runner.invoke(cli_main, ["frobnicate"])
        assert result.exit_code == 2
