// Round trips against a live service (spawned in globalSetup). These cover
// the human-in-the-loop flows end to end: line adjustment with revision
// tokens, labelling into the reference set, and classification review.

import { beforeAll, describe, expect, it } from "vitest";

import { Client, ConflictError } from "../src/api.js";
import { validateCode } from "../src/validation.js";
import type { CatalogRow } from "../src/types.js";

const base = () => {
  const value = process.env.TRAMPKIT_BASE;
  if (!value) throw new Error("TRAMPKIT_BASE not set; globalSetup did not run");
  return value;
};

let client: Client;
let catalog: CatalogRow[];

beforeAll(async () => {
  client = new Client(base());
  catalog = await client.catalog();
});

async function firstJump(): Promise<{ index: number; segmentId: string }> {
  const segments = await client.segments("r1");
  const index = segments.segments.findIndex((s) => s.is_routine_jump);
  return { index, segmentId: `r1:${index}` };
}

describe("catalog", () => {
  it("serves all 33 skills with tariffs", () => {
    expect(catalog).toHaveLength(33);
    const barani = catalog.find((r) => r.code === "BRIt");
    expect(barani?.tariff).toBe(0.6);
  });
});

describe("trampoline line adjustment", () => {
  it("round-trips: moving the line up recomputes contact flags", async () => {
    const routine = await client.routine("r1");
    const before = await client.segments("r1");
    const newRow = before.line_row - 8;
    const { routine: updated, segments: after } = await client.putTrampolineLine(
      "r1",
      newRow,
      routine.revision,
    );
    expect(updated.line.top_row).toBe(newRow);
    expect(updated.line.source).toBe("user_adjusted");
    expect(after.line_row).toBe(newRow);
    // moving the line up never removes contact frames
    const count = (doc: { contact?: boolean[] }) =>
      (doc.contact ?? []).filter(Boolean).length;
    expect(count(after)).toBeGreaterThanOrEqual(count(before));
    // a refetch agrees with the mutation response (single source of truth)
    const refetched = await client.segments("r1");
    expect(refetched).toEqual(after);
  });

  it("rejects a stale revision token with a conflict, never retrying", async () => {
    const routine = await client.routine("r1");
    await expect(
      client.putTrampolineLine("r1", routine.line.top_row, routine.revision + 41),
    ).rejects.toBeInstanceOf(ConflictError);
    const unchanged = await client.routine("r1");
    expect(unchanged.line.top_row).toBe(routine.line.top_row);
  });
});

describe("labelling", () => {
  it("blocks invalid codes client-side and the server 422s when forced", async () => {
    const check = validateCode(catalog, "ZZZ");
    expect(check.ok).toBe(false); // the UI stops here and sends nothing
    const { segmentId } = await firstJump();
    const routine = await client.routine("r1");
    const forced = await fetch(`${base()}/api/segments/${segmentId}/label`, {
      method: "POST",
      headers: { "Content-Type": "application/json", "If-Match": `"${routine.revision}"` },
      body: JSON.stringify({ code: "ZZZ" }),
    });
    expect(forced.status).toBe(422);
  });

  it("labels a segment into the reference set and the panel shows it", async () => {
    const { index, segmentId } = await firstJump();
    const routine = await client.routine("r1");
    const check = validateCode(catalog, "FTF");
    expect(check.ok).toBe(true);
    const response = await client.labelSegment(segmentId, "FTF", true, routine.revision);
    expect(response.labels[String(index)]).toBe("FTF");
    expect(response.reference_entry?.code).toBe("FTF");

    const refset = await client.referenceSet();
    const ids = refset.entries.map((e) => e.entry_id);
    expect(ids).toContain(response.reference_entry!.entry_id);
    const entry = refset.entries.find(
      (e) => e.entry_id === response.reference_entry!.entry_id,
    )!;
    expect(entry.code).toBe("FTF");
    expect(entry.routine_id).toBe("r1");
    expect(entry.trajectory.angles[0]).toHaveLength(12);
  });
});

describe("classification review", () => {
  it("ranks the labelled reference first with zero error and 12 feature bars", async () => {
    const { segmentId } = await firstJump();
    const result = await client.classifySegment(segmentId);
    expect(result.best).toBe("FTF");
    expect(result.best_mse).toBe(0);
    expect(result.ranked[0].code).toBe("FTF");
    expect(result.per_feature).toHaveLength(12);
    const observed = await client.segmentFeatures(segmentId);
    expect(observed.angles.length).toBeGreaterThan(2);
  });
});

describe("reference set maintenance", () => {
  it("deletes entries under the revision token", async () => {
    const before = await client.referenceSet();
    expect(before.entries.length).toBeGreaterThan(0);
    const target = before.entries[before.entries.length - 1];
    await expect(
      client.deleteReference(target.entry_id, before.revision + 40),
    ).rejects.toBeInstanceOf(ConflictError);
    await client.deleteReference(target.entry_id, before.revision);
    const after = await client.referenceSet();
    expect(after.entries.map((e) => e.entry_id)).not.toContain(target.entry_id);
  });
});

describe("pose stream and crops", () => {
  it("serves poses for the skeleton overlay", async () => {
    const text = await client.poses("r1");
    expect(text).not.toBeNull();
    expect(text!.split("\n")[0]).toContain("fps");
  });

  it("serves PNG crops with overlay metadata for airborne frames", async () => {
    const { index } = await firstJump();
    const segments = await client.segments("r1");
    const [first] = segments.segments[index].airborne!;
    const meta = await client.frameMeta("r1", first);
    expect(meta.origin).toHaveLength(2);
    expect(meta.hull.length).toBeGreaterThanOrEqual(3);
    const png = await fetch(client.frameUrl("r1", first));
    expect(png.status).toBe(200);
    expect(png.headers.get("content-type")).toBe("image/png");
  });

  it("has no evaluation yet", async () => {
    expect(await client.latestEvaluation()).toBeNull();
  });
});
