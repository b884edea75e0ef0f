import { describe, expect, it } from "vitest";

import { ChatStore } from "../src/state";
import type { AskResponse } from "../src/types";

function answerFor(question: string): AskResponse {
  return {
    model_id: "river",
    session_id: null,
    text: `answer to ${question}`,
    category: "KnowledgeModel",
    k_score: 2,
    cited_doc_ids: ["river/Knowledge/guards"],
    refinement_history: ["draft", `answer to ${question}`],
    trace_id: null,
  };
}

describe("ChatStore", () => {
  it("keeps turns in submission order", () => {
    const store = new ChatStore();
    const first = store.submit("first?")!;
    store.resolve(first.id, answerFor("first?"));
    const second = store.submit("second?")!;
    store.resolve(second.id, answerFor("second?"));
    expect(store.list().map((t) => t.question)).toEqual(["first?", "second?"]);
  });

  it("blocks empty and whitespace questions", () => {
    const store = new ChatStore();
    expect(store.canSubmit("")).toBe(false);
    expect(store.canSubmit("   ")).toBe(false);
    expect(store.submit("  ")).toBeNull();
    expect(store.list()).toHaveLength(0);
  });

  it("allows only one in-flight question", () => {
    const store = new ChatStore();
    const turn = store.submit("Who is a guard?")!;
    expect(store.canSubmit("another?")).toBe(false);
    expect(store.submit("another?")).toBeNull();
    store.resolve(turn.id, answerFor("Who is a guard?"));
    expect(store.canSubmit("another?")).toBe(true);
  });

  it("resolves a pending turn with its answer", () => {
    const store = new ChatStore();
    const turn = store.submit("Who is a guard?")!;
    expect(turn.status).toBe("pending");
    store.resolve(turn.id, answerFor("Who is a guard?"));
    expect(turn.status).toBe("answered");
    expect(turn.answer?.text).toBe("answer to Who is a guard?");
  });

  it("failure keeps the transcript and the question", () => {
    const store = new ChatStore();
    const kept = store.submit("kept?")!;
    store.resolve(kept.id, answerFor("kept?"));
    const failed = store.submit("failing?")!;
    store.fail(failed.id, "service unreachable");
    expect(store.list()).toHaveLength(2);
    expect(store.list()[1]!.question).toBe("failing?");
    expect(store.list()[1]!.status).toBe("error");
    expect(store.list()[1]!.error).toBe("service unreachable");
  });

  it("retries a failed turn in place", () => {
    const store = new ChatStore();
    const first = store.submit("first?")!;
    store.fail(first.id, "boom");
    const second = store.submit("second?")!;
    store.resolve(second.id, answerFor("second?"));

    const retried = store.retry(first.id);
    expect(retried?.id).toBe(first.id);
    expect(retried?.status).toBe("pending");
    expect(store.list().map((t) => t.question)).toEqual(["first?", "second?"]);

    store.resolve(first.id, answerFor("first?"));
    expect(store.list()[0]!.status).toBe("answered");
  });

  it("does not retry answered turns or while one is pending", () => {
    const store = new ChatStore();
    const done = store.submit("done?")!;
    store.resolve(done.id, answerFor("done?"));
    expect(store.retry(done.id)).toBeNull();

    const failed = store.submit("failed?")!;
    store.fail(failed.id, "boom");
    store.submit("pending?");
    expect(store.retry(failed.id)).toBeNull();
  });
});
