/** Binary PGM (P5) decoding for inline tile images. */

export interface GrayImage {
  width: number;
  height: number;
  pixels: Uint8Array; // row-major, one byte per pixel
}

const B64_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

export function base64ToBytes(b64: string): Uint8Array {
  if (typeof atob === "function") {
    const bin = atob(b64);
    const out = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
    return out;
  }
  // environment-independent fallback
  const clean = b64.replace(/=+$/, "");
  const out = new Uint8Array(Math.floor((clean.length * 3) / 4));
  let buffer = 0;
  let bits = 0;
  let pos = 0;
  for (const ch of clean) {
    const value = B64_ALPHABET.indexOf(ch);
    if (value < 0) continue;
    buffer = (buffer << 6) | value;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out[pos++] = (buffer >> bits) & 0xff;
    }
  }
  return out.subarray(0, pos);
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d;
}

export function decodePgm(data: Uint8Array): GrayImage {
  // header: "P5" <ws> width <ws> height <ws> maxval <single ws> raster
  const fields: string[] = [];
  let pos = 0;
  while (fields.length < 4) {
    while (pos < data.length && isSpace(data[pos])) pos++;
    if (data[pos] === 0x23) {
      // '#' comment to end of line
      while (pos < data.length && data[pos] !== 0x0a) pos++;
      continue;
    }
    let token = "";
    while (pos < data.length && !isSpace(data[pos])) {
      token += String.fromCharCode(data[pos]);
      pos++;
    }
    if (!token) throw new Error("truncated PGM header");
    fields.push(token);
  }
  pos++; // single whitespace after maxval
  const [magic, w, h, maxval] = fields;
  if (magic !== "P5") throw new Error(`not a binary PGM (magic ${magic})`);
  if (maxval !== "255") throw new Error(`unsupported maxval ${maxval}`);
  const width = parseInt(w, 10);
  const height = parseInt(h, 10);
  const raster = data.subarray(pos, pos + width * height);
  if (raster.length !== width * height) throw new Error("truncated PGM raster");
  return { width, height, pixels: new Uint8Array(raster) };
}

/** Expand grayscale to RGBA for canvas ImageData. */
export function toRgba(image: GrayImage): Uint8ClampedArray {
  const out = new Uint8ClampedArray(image.width * image.height * 4);
  for (let i = 0; i < image.pixels.length; i++) {
    const v = image.pixels[i];
    out[4 * i] = v;
    out[4 * i + 1] = v;
    out[4 * i + 2] = v;
    out[4 * i + 3] = 255;
  }
  return out;
}

/** Paint onto a canvas; no-ops when the 2D context is unavailable
 * (e.g. jsdom), leaving the decoded size on data attributes. */
export function paintTile(canvas: HTMLCanvasElement, image: GrayImage): void {
  canvas.width = image.width;
  canvas.height = image.height;
  canvas.dataset.decodedWidth = String(image.width);
  canvas.dataset.decodedHeight = String(image.height);
  let ctx: CanvasRenderingContext2D | null = null;
  try {
    ctx = canvas.getContext("2d");
  } catch {
    ctx = null; // headless DOM without canvas support
  }
  if (!ctx) return;
  const imageData = ctx.createImageData(image.width, image.height);
  imageData.data.set(toRgba(image));
  ctx.putImageData(imageData, 0, 0);
}
