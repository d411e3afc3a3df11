import { describe, expect, it } from "vitest";

import { tariffOf, validateCode } from "../src/validation.js";
import type { CatalogRow } from "../src/types.js";

const catalog: CatalogRow[] = [
  { code: "F0F", name: "Straight Bounce", tariff: 0.0, takeoff: "feet", landing: "feet", shape: "straight", somersault_quarters: 0, twist_halves: 0 },
  { code: "BRIt", name: "Barani (Tuck)", tariff: 0.6, takeoff: "feet", landing: "feet", shape: "tuck", somersault_quarters: 4, twist_halves: 1 },
];

describe("skill-code validation", () => {
  it("accepts catalog codes and trims whitespace", () => {
    expect(validateCode(catalog, " BRIt ")).toEqual({ ok: true, code: "BRIt" });
  });

  it("rejects unknown codes with a reason", () => {
    const check = validateCode(catalog, "ZZZ");
    expect(check.ok).toBe(false);
    if (!check.ok) expect(check.reason).toContain("ZZZ");
  });

  it("is case-sensitive but suggests the right casing", () => {
    const check = validateCode(catalog, "brit");
    expect(check.ok).toBe(false);
    if (!check.ok) expect(check.reason).toContain("BRIt");
  });

  it("rejects empty input", () => {
    expect(validateCode(catalog, "   ").ok).toBe(false);
  });

  it("looks up tariffs", () => {
    expect(tariffOf(catalog, "BRIt")).toBe(0.6);
    expect(tariffOf(catalog, "XOX")).toBeNull();
  });
});
