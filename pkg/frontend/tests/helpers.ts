import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import type { UiBundle } from "../src/types.js";

const DOCS = ["meta", "layout", "zscores", "spectrum", "annotations", "series"] as const;

const HERE = dirname(fileURLToPath(import.meta.url));

export function fixtureDir(name: string): string {
  return join(HERE, "fixtures", name);
}

export function readDoc(bundle: string, doc: string): any {
  return JSON.parse(readFileSync(`${fixtureDir(bundle)}/${doc}.json`, "utf8"));
}

/** Assemble a fixture bundle straight from disk (no fetch involved). */
export function readFixture(name: string): UiBundle {
  const [meta, layout, zscores, spectrum, annotations, series] = DOCS.map((d) =>
    readDoc(name, d),
  );
  return { meta, layout, zscores, spectrum, annotations, series };
}

/** fetch() stand-in serving a fixture directory at any base URL. */
export function fetchStub(name: string): (url: string) => Promise<Response> {
  return async (url: string) => {
    const stem = url.split("/").pop() ?? "";
    if (!(DOCS as readonly string[]).includes(stem)) {
      return new Response("not found", { status: 404 });
    }
    const body = readFileSync(`${fixtureDir(name)}/${stem}.json`, "utf8");
    return new Response(body, {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  };
}

/** Parse "rgb(r,g,b)" into channel values (whitespace-tolerant, since the
 * DOM normalizes colors with spaces on readback). */
export function rgbChannels(color: string): [number, number, number] {
  const match = /^rgb\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$/.exec(color);
  if (!match) throw new Error(`not an rgb() color: ${color}`);
  return [Number(match[1]), Number(match[2]), Number(match[3])];
}
