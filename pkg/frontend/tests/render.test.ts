import { describe, expect, it } from "vitest";

import {
  categoryLabel,
  escapeHtml,
  renderBadge,
  renderCitations,
  renderTrace,
  renderTranscript,
  renderTurn,
} from "../src/render";
import type { AnswerCategory, AskResponse, ChatTurn, Trace } from "../src/types";

const GUARD_ANSWER: AskResponse = {
  model_id: "river",
  session_id: null,
  text:
    "In the river crossing problem, the guards are individuals who need to " +
    "be transported across the river. They play a crucial role in ensuring " +
    "that the prisoners do not escape during the crossing.",
  category: "KnowledgeModel",
  k_score: 2,
  cited_doc_ids: ["river/Knowledge/guards", "river/Knowledge/relationships"],
  refinement_history: ["draft", "refined"],
  trace_id: null,
};

function answeredTurn(answer: AskResponse): ChatTurn {
  return {
    id: 1,
    question: "Who is a guard?",
    status: "answered",
    answer,
    error: null,
    trace: null,
  };
}

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("worked example turn", () => {
  it("renders the answer text, a category badge, and exactly 2 citations", () => {
    const html = renderTurn(answeredTurn(GUARD_ANSWER));
    expect(html).toContain("They play a crucial role");
    expect(html).toContain('class="badge badge-knowledgemodel"');
    expect(html).toContain(">Knowledge<");
    expect(count(html, '<li class="citation">')).toBe(2);
    expect(html).toContain("river/Knowledge/guards");
    expect(html).toContain("river/Knowledge/relationships");
  });
});

describe("category badges", () => {
  const labels: Array<[AnswerCategory, string]> = [
    ["KnowledgeModel", "Knowledge"],
    ["MethodTaskModel", "Method-Task"],
    ["MultiModel", "Multi"],
    ["Irrelevant", "Irrelevant"],
    ["Episodic", "Episodic"],
  ];

  it.each(labels)("labels %s as %s", (category, label) => {
    expect(categoryLabel(category)).toBe(label);
    expect(renderBadge(category)).toContain(`>${label}<`);
  });
});

describe("citations panel", () => {
  it("is omitted when nothing is cited", () => {
    expect(renderCitations([])).toBe("");
  });

  it("is an expandable panel with a count", () => {
    const html = renderCitations(["a/Knowledge/x"]);
    expect(html).toContain("<details");
    expect(html).toContain("1 cited document");
  });
});

describe("turn states", () => {
  it("pending turns show a placeholder, no badge", () => {
    const turn: ChatTurn = {
      id: 3, question: "Who?", status: "pending", answer: null, error: null, trace: null,
    };
    const html = renderTurn(turn);
    expect(html).toContain("answer-pending");
    expect(html).not.toContain("badge-");
  });

  it("error turns carry the message and a retry button", () => {
    const turn: ChatTurn = {
      id: 7, question: "Who?", status: "error",
      answer: null, error: "service unreachable", trace: null,
    };
    const html = renderTurn(turn);
    expect(html).toContain("service unreachable");
    expect(html).toContain('data-retry="7"');
    expect(html).toContain("Who?");
  });

  it("escapes question and answer text", () => {
    const answer = { ...GUARD_ANSWER, text: "<b>bold</b> & more" };
    const turn = { ...answeredTurn(answer), question: "<script>alert(1)</script>" };
    const html = renderTurn(turn);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
    expect(html).toContain("&lt;b&gt;bold&lt;/b&gt; &amp; more");
  });

  it("transcript lists every turn in order", () => {
    const turns: ChatTurn[] = [
      answeredTurn(GUARD_ANSWER),
      { id: 2, question: "next?", status: "pending", answer: null, error: null, trace: null },
    ];
    const html = renderTranscript(turns);
    expect(html.indexOf('data-turn="1"')).toBeLessThan(html.indexOf('data-turn="2"'));
  });
});

const SAMPLE_TRACE: Trace = {
  trace_id: "tr-0123456789abcdef",
  model_id: "river",
  task_id: "transport",
  outcome: "reached_end",
  events: [
    {
      step_index: 0, state_id: "select_load", transition_id: null,
      world_state: { left_guards: 3, left_prisoners: 3, boat_side: "left" },
      note: "initial state", depth: 0,
    },
    {
      step_index: 1, state_id: "crossing", transition_id: "load_two_prisoners",
      world_state: { left_guards: 3, left_prisoners: 1, boat_side: "left" },
      note: "Load the boat with two prisoners.", depth: 0,
    },
    {
      step_index: 2, state_id: "unload", transition_id: "cross_right",
      world_state: { left_guards: 3, left_prisoners: 1, boat_side: "right" },
      note: "Move the boat to the right bank.", depth: 0,
    },
  ],
};

describe("trace viewer", () => {
  it("renders one step per trace event, in order", () => {
    const html = renderTrace(SAMPLE_TRACE, true);
    expect(count(html, '<li class="trace-step">')).toBe(SAMPLE_TRACE.events.length);
    const order = [
      html.indexOf("select_load"),
      html.indexOf("load_two_prisoners"),
      html.indexOf("cross_right"),
    ];
    expect(order[0]).toBeGreaterThan(-1);
    expect([...order].sort((a, b) => a - b)).toEqual(order);
  });

  it("shows state, transition, and world-state diff for each step", () => {
    const html = renderTrace(SAMPLE_TRACE, true);
    expect(html).toContain("initial state");
    expect(html).toContain("left_prisoners: 3 &rarr; 1");
    expect(html).toContain("boat_side: left &rarr; right");
    expect(html).toContain("reached_end");
  });

  it("notes when the run used the default initial state", () => {
    expect(renderTrace(SAMPLE_TRACE, true)).toContain("default initial state");
    expect(renderTrace(SAMPLE_TRACE, false)).not.toContain("default initial state");
  });

  it("is embedded in episodic answered turns", () => {
    const episodic: AskResponse = {
      ...GUARD_ANSWER,
      category: "Episodic",
      text: "Simulation of task 'transport'...",
      cited_doc_ids: ["river/Task/transport"],
      trace_id: SAMPLE_TRACE.trace_id,
    };
    const turn = { ...answeredTurn(episodic), trace: SAMPLE_TRACE };
    const html = renderTurn(turn);
    expect(html).toContain('class="trace"');
    expect(count(html, '<li class="trace-step">')).toBe(3);
  });
});

describe("escapeHtml", () => {
  it("escapes the five significant characters", () => {
    expect(escapeHtml(`<a href="x">&'</a>`)).toBe(
      "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;",
    );
  });
});
