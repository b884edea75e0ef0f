/** Entry point: wires the store, the API client, and the DOM together. */

import { ApiClient, ApiError } from "./api";
import { renderModelOptions, renderTranscript } from "./render";
import { ChatStore } from "./state";
import type { ChatTurn } from "./types";

const api = new ApiClient();
const store = new ChatStore();

const transcriptEl = document.querySelector<HTMLDivElement>("#transcript")!;
const formEl = document.querySelector<HTMLFormElement>("#ask-form")!;
const inputEl = document.querySelector<HTMLInputElement>("#question")!;
const sendEl = document.querySelector<HTMLButtonElement>("#send")!;
const modelEl = document.querySelector<HTMLSelectElement>("#model")!;
const statusEl = document.querySelector<HTMLParagraphElement>("#status")!;

function render(): void {
  transcriptEl.innerHTML = renderTranscript(store.list());
  const blocked = store.hasPending || modelEl.value === "";
  sendEl.disabled = blocked;
  inputEl.disabled = store.hasPending;
  transcriptEl.scrollTop = transcriptEl.scrollHeight;
}

async function runTurn(turn: ChatTurn): Promise<void> {
  render();
  try {
    const answer = await api.ask(modelEl.value, turn.question);
    store.resolve(turn.id, answer);
    if (answer.category === "Episodic" && answer.trace_id !== null) {
      // The episodic pipeline already ran the simulation; fetch its trace.
      const trace = await api.getTrace(answer.trace_id);
      store.attachTrace(turn.id, trace);
    }
  } catch (error) {
    const message = error instanceof ApiError ? error.message : String(error);
    store.fail(turn.id, message);
  }
  render();
}

formEl.addEventListener("submit", (event) => {
  event.preventDefault();
  if (modelEl.value === "") return;
  const turn = store.submit(inputEl.value);
  if (turn === null) return;
  inputEl.value = "";
  void runTurn(turn);
});

transcriptEl.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const retryId = target.dataset.retry;
  if (retryId === undefined) return;
  const turn = store.retry(Number(retryId));
  if (turn !== null) void runTurn(turn);
});

async function loadModels(): Promise<void> {
  try {
    const { models } = await api.getModels();
    modelEl.innerHTML = renderModelOptions(models);
    statusEl.textContent =
      models.length === 0 ? "No models registered; upload one via the API." : "";
  } catch (error) {
    statusEl.textContent =
      error instanceof ApiError ? error.message : `failed to load models: ${String(error)}`;
  }
  render();
}

void loadModels();
