import { describe, expect, it } from "vitest";

import { normalizeTranscript } from "../src/normalize.js";

describe("normalizeTranscript", () => {
  it("matches the server rule on the canonical example", () => {
    expect(normalizeTranscript(" Three   RIVER nine ")).toBe("three river nine");
  });

  it("collapses tabs and newlines", () => {
    expect(normalizeTranscript("a\t b\n c")).toBe("a b c");
  });

  it("is idempotent", () => {
    const inputs = ["  MiXeD   Case ", "one two", "", "   ", "x y"];
    for (const input of inputs) {
      const once = normalizeTranscript(input);
      expect(normalizeTranscript(once)).toBe(once);
    }
  });
});
