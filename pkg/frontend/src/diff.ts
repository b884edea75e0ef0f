/** World-state diffs between consecutive trace events. */

import type { SlotValue, TraceEvent } from "./types";

export interface SlotChange {
  slot: string;
  before: SlotValue | undefined;
  after: SlotValue;
}

/** Slots whose value changed (or appeared), sorted by slot name. */
export function worldStateDiff(
  prev: Record<string, SlotValue>,
  next: Record<string, SlotValue>,
): SlotChange[] {
  const changes: SlotChange[] = [];
  for (const slot of Object.keys(next).sort()) {
    const before = prev[slot];
    const after = next[slot] as SlotValue;
    if (before !== after) {
      changes.push({ slot, before, after });
    }
  }
  return changes;
}

export interface TraceStep {
  event: TraceEvent;
  changes: SlotChange[];
}

/** One step per event, each carrying its diff against the previous event. */
export function traceSteps(events: TraceEvent[]): TraceStep[] {
  return events.map((event, i) => ({
    event,
    changes: i === 0 ? [] : worldStateDiff(events[i - 1]!.world_state, event.world_state),
  }));
}
