// Client-side skill-code validation against the fetched catalog. The
// picker is catalog-driven, so free text only reaches the server when the
// catalog agrees it is a real code (the server still enforces with a 422).

import type { CatalogRow } from "./types.js";

export type CodeCheck =
  | { ok: true; code: string }
  | { ok: false; reason: string };

export function validateCode(catalog: CatalogRow[], token: string): CodeCheck {
  const code = token.trim();
  if (!code) {
    return { ok: false, reason: "empty skill code" };
  }
  if (catalog.some((row) => row.code === code)) {
    return { ok: true, code };
  }
  const caseHit = catalog.find((row) => row.code.toLowerCase() === code.toLowerCase());
  if (caseHit) {
    return { ok: false, reason: `codes are case-sensitive; did you mean ${caseHit.code}?` };
  }
  return { ok: false, reason: `unknown skill code: ${code}` };
}

export function tariffOf(catalog: CatalogRow[], code: string): number | null {
  const row = catalog.find((r) => r.code === code);
  return row ? row.tariff : null;
}
