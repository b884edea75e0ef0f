/** Wire types mirroring docs/api.md, plus the client-side chat state. */

export interface ModelSummary {
  id: string;
  title: string;
  tasks: number;
  methods: number;
  knowledge: number;
  documents: number;
  warnings: string[];
}

export type AnswerCategory =
  | "KnowledgeModel"
  | "MethodTaskModel"
  | "MultiModel"
  | "Irrelevant"
  | "Episodic";

export interface AskResponse {
  model_id: string;
  session_id: string | null;
  text: string;
  category: AnswerCategory;
  k_score: number;
  cited_doc_ids: string[];
  refinement_history: string[];
  trace_id: string | null;
}

export type SlotValue = number | boolean | string;

export interface TraceEvent {
  step_index: number;
  state_id: string;
  transition_id: string | null;
  world_state: Record<string, SlotValue>;
  note: string;
  depth: number;
}

export interface Trace {
  trace_id: string;
  model_id: string;
  task_id: string;
  outcome: string;
  events: TraceEvent[];
}

export interface SimulateResponse extends Trace {
  summary: string;
}

export type TurnStatus = "pending" | "answered" | "error";

/** One question/answer exchange in the transcript. */
export interface ChatTurn {
  id: number;
  question: string;
  status: TurnStatus;
  answer: AskResponse | null;
  error: string | null;
  trace: Trace | null;
}
