import { describe, expect, it } from "vitest";

import { base64ToBytes, decodePgm, toRgba } from "../src/pgm.js";

function encodePgm(width: number, height: number, pixels: number[]): Uint8Array {
  const header = `P5\n${width} ${height}\n255\n`;
  const out = new Uint8Array(header.length + pixels.length);
  for (let i = 0; i < header.length; i++) out[i] = header.charCodeAt(i);
  out.set(pixels, header.length);
  return out;
}

describe("decodePgm", () => {
  it("decodes a minimal P5 image", () => {
    const img = decodePgm(encodePgm(2, 3, [0, 64, 128, 192, 255, 10]));
    expect(img.width).toBe(2);
    expect(img.height).toBe(3);
    expect([...img.pixels]).toEqual([0, 64, 128, 192, 255, 10]);
  });

  it("skips header comments", () => {
    const text = "P5\n# a comment line\n2 2\n255\n";
    const bytes = new Uint8Array([...text].map((c) => c.charCodeAt(0)).concat([1, 2, 3, 4]));
    const img = decodePgm(bytes);
    expect(img.width).toBe(2);
    expect([...img.pixels]).toEqual([1, 2, 3, 4]);
  });

  it("rejects truncated raster", () => {
    expect(() => decodePgm(encodePgm(4, 4, [1, 2, 3]))).toThrow(/truncated/);
  });

  it("rejects non-P5 payloads", () => {
    const text = "P2\n2 2\n255\n";
    const bytes = new Uint8Array([...text].map((c) => c.charCodeAt(0)));
    expect(() => decodePgm(bytes)).toThrow(/P5|magic/);
  });

  it("round-trips through base64", () => {
    const original = encodePgm(3, 1, [9, 99, 199]);
    let b64 = "";
    if (typeof btoa === "function") {
      b64 = btoa(String.fromCharCode(...original));
    } else {
      b64 = Buffer.from(original).toString("base64");
    }
    const img = decodePgm(base64ToBytes(b64));
    expect([...img.pixels]).toEqual([9, 99, 199]);
  });
});

describe("toRgba", () => {
  it("replicates gray into opaque rgba", () => {
    const rgba = toRgba({ width: 1, height: 2, pixels: new Uint8Array([7, 250]) });
    expect([...rgba]).toEqual([7, 7, 7, 255, 250, 250, 250, 255]);
  });
});
