// View state and its pure transitions. The frame cursor is always clamped
// to the loaded routine's frame range, and revision tokens are only ever
// replaced by values the server handed back.

import type { Segment, SegmentsDoc } from "./types.js";

export interface OverlayToggles {
  skeleton: boolean;
  hull: boolean;
  bbox: boolean;
  centroidTrack: boolean;
  trampolineLine: boolean;
  anglePlots: boolean;
}

export interface ViewState {
  routineId: string | null;
  routineRevision: number;
  refsetRevision: number;
  frameCursor: number;
  frameRange: [number, number];
  currentSegment: number | null;
  pendingLabel: string | null;
  addToReferenceSet: boolean;
  toggles: OverlayToggles;
}

export function initialState(): ViewState {
  return {
    routineId: null,
    routineRevision: 0,
    refsetRevision: 0,
    frameCursor: 0,
    frameRange: [0, 0],
    currentSegment: null,
    pendingLabel: null,
    addToReferenceSet: false,
    toggles: {
      skeleton: true,
      hull: true,
      bbox: true,
      centroidTrack: false,
      trampolineLine: true,
      anglePlots: true,
    },
  };
}

export function clampCursor(state: ViewState, frame: number): number {
  const [lo, hi] = state.frameRange;
  return Math.min(hi, Math.max(lo, Math.round(frame)));
}

export function frameRangeOf(doc: SegmentsDoc): [number, number] {
  const first = doc.segments[0];
  const last = doc.segments[doc.segments.length - 1];
  return first && last ? [first.start, last.end] : [0, 0];
}

export function withRoutine(
  state: ViewState,
  routineId: string,
  revision: number,
  doc: SegmentsDoc,
): ViewState {
  const range = frameRangeOf(doc);
  return {
    ...state,
    routineId,
    routineRevision: revision,
    frameRange: range,
    frameCursor: range[0],
    currentSegment: null,
    pendingLabel: null,
  };
}

export function stepCursor(state: ViewState, delta: number): ViewState {
  return { ...state, frameCursor: clampCursor(state, state.frameCursor + delta) };
}

export function seekCursor(state: ViewState, frame: number): ViewState {
  return { ...state, frameCursor: clampCursor(state, frame) };
}

export function selectSegment(state: ViewState, index: number, segment: Segment): ViewState {
  const target = segment.airborne ? segment.airborne[0] : segment.start;
  return {
    ...state,
    currentSegment: index,
    frameCursor: clampCursor(state, target),
    pendingLabel: null,
  };
}

export function toggleOverlay(state: ViewState, key: keyof OverlayToggles): ViewState {
  return { ...state, toggles: { ...state.toggles, [key]: !state.toggles[key] } };
}

export function setPendingLabel(state: ViewState, code: string | null): ViewState {
  return { ...state, pendingLabel: code };
}

export function setAddToReferenceSet(state: ViewState, value: boolean): ViewState {
  return { ...state, addToReferenceSet: value };
}

export function noteRoutineRevision(state: ViewState, revision: number): ViewState {
  return { ...state, routineRevision: revision };
}

export function noteRefsetRevision(state: ViewState, revision: number): ViewState {
  return { ...state, refsetRevision: revision };
}

/** Frames to prefetch around the cursor: the next/previous five crops. */
export function prefetchWindow(state: ViewState, radius = 5): number[] {
  const out: number[] = [];
  for (let d = 1; d <= radius; d++) {
    for (const frame of [state.frameCursor + d, state.frameCursor - d]) {
      if (frame >= state.frameRange[0] && frame <= state.frameRange[1]) {
        out.push(frame);
      }
    }
  }
  return out;
}
