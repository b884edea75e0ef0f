/** Transcript state: turns in submission order, one in-flight question. */

import type { AskResponse, ChatTurn, Trace } from "./types";

export class ChatStore {
  private turns: ChatTurn[] = [];
  private nextId = 1;

  list(): readonly ChatTurn[] {
    return this.turns;
  }

  get hasPending(): boolean {
    return this.turns.some((t) => t.status === "pending");
  }

  /** Empty questions and double submissions are blocked client-side. */
  canSubmit(question: string): boolean {
    return question.trim().length > 0 && !this.hasPending;
  }

  submit(question: string): ChatTurn | null {
    if (!this.canSubmit(question)) return null;
    const turn: ChatTurn = {
      id: this.nextId++,
      question: question.trim(),
      status: "pending",
      answer: null,
      error: null,
      trace: null,
    };
    this.turns.push(turn);
    return turn;
  }

  private find(id: number): ChatTurn {
    const turn = this.turns.find((t) => t.id === id);
    if (!turn) throw new Error(`no turn with id ${id}`);
    return turn;
  }

  resolve(id: number, answer: AskResponse): void {
    const turn = this.find(id);
    turn.status = "answered";
    turn.answer = answer;
    turn.error = null;
  }

  attachTrace(id: number, trace: Trace): void {
    this.find(id).trace = trace;
  }

  fail(id: number, message: string): void {
    const turn = this.find(id);
    turn.status = "error";
    turn.error = message;
    turn.answer = null;
  }

  /** Re-submit a failed turn in place; the transcript keeps its position. */
  retry(id: number): ChatTurn | null {
    const turn = this.find(id);
    if (turn.status !== "error" || this.hasPending) return null;
    turn.status = "pending";
    turn.error = null;
    return turn;
  }
}
