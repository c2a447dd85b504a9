import { describe, expect, it } from "vitest";
import { buildLegend } from "../src/legend.js";

describe("buildLegend", () => {
  it("marks exactly the class boundaries -1.5, 1.5 and 2", () => {
    const legend = buildLegend(document, 4);
    const marks = Array.from(legend.querySelectorAll(".legend-mark"));
    expect(marks.map((m) => (m as HTMLElement).dataset.edge)).toEqual([
      "-1.5",
      "1.5",
      "2",
    ]);
    expect(marks.map((m) => m.textContent)).toEqual(["-1.5", "1.5", "2"]);
  });

  it("positions each mark proportionally on the ±zMax axis", () => {
    const legend = buildLegend(document, 4);
    const marks = Array.from(legend.querySelectorAll(".legend-mark")) as HTMLElement[];
    expect(marks[0].style.left).toBe("31.25%");
    expect(marks[1].style.left).toBe("68.75%");
    expect(marks[2].style.left).toBe("75%");
  });

  it("tracks a different clamp", () => {
    const legend = buildLegend(document, 8);
    const marks = Array.from(legend.querySelectorAll(".legend-mark")) as HTMLElement[];
    expect(marks[2].style.left).toBe("62.5%");
  });

  it("labels both ends with the clamp value", () => {
    const legend = buildLegend(document, 4);
    const ends = Array.from(legend.querySelectorAll(".legend-end"));
    expect(ends).toHaveLength(2);
    expect(ends[0].textContent).toContain("4");
    expect(ends[1].textContent).toContain("4");
  });

  it("paints the bar with a turbo gradient", () => {
    const legend = buildLegend(document, 4);
    const bar = legend.querySelector(".legend-bar") as HTMLElement;
    expect(bar.style.background).toContain("linear-gradient");
  });
});
