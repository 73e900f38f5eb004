import { describe, expect, it } from "vitest";

import { fixed6, reprFloat, roundTiesEven } from "../src/pyformat.js";

// Expected strings below were produced by the reference toolkit's
// formatter on the same doubles and are frozen here; the whole point
// of this module is matching them byte for byte.

describe("fixed6", () => {
  it("rounds half to even like the reference writer, not toFixed", () => {
    // 0.0078125 is exactly representable; the tie must round down.
    expect(fixed6(0.0078125)).toBe("0.007812");
    expect((0.0078125).toFixed(6)).toBe("0.007813");
  });

  it("matches the frozen oracle table", () => {
    const cases: Array<[number, string]> = [
      [0.5, "0.500000"],
      [0.0, "0.000000"],
      [-0.0, "-0.000000"],
      [1e-7, "0.000000"],
      [-1e-7, "-0.000000"],
      [-2.5e-7, "-0.000000"],
      [0.015625, "0.015625"],
      [1656.5023392678927, "1656.502339"],
      [16733.20078125, "16733.200781"],
      [123.4567895, "123.456789"],
      [447.21359549995793, "447.213595"],
      [1.0000005, "1.000001"],
      [2.0000005, "2.000001"],
    ];
    for (const [value, expected] of cases) {
      expect(fixed6(value), `fixed6(${value})`).toBe(expected);
    }
  });

  it("rejects non-finite values", () => {
    expect(() => fixed6(Number.NaN)).toThrow();
    expect(() => fixed6(Number.POSITIVE_INFINITY)).toThrow();
  });
});

describe("reprFloat", () => {
  it("matches the frozen oracle table", () => {
    const cases: Array<[number, string]> = [
      [1.1, "1.1"],
      [0.1 + 0.2, "0.30000000000000004"],
      [1e16, "1e+16"],
      [1e15, "1000000000000000.0"],
      [9999999999999998.0, "9999999999999998.0"],
      [1e-4, "0.0001"],
      [1e-5, "1e-05"],
      [123456789.0, "123456789.0"],
      [-0.0, "-0.0"],
      [0.0, "0.0"],
      [5e-324, "5e-324"],
      [1.7976931348623157e308, "1.7976931348623157e+308"],
      [0.4, "0.4"],
      [1.12, "1.12"],
      [1.08, "1.08"],
      [70.0, "70.0"],
      [2.5e-7, "2.5e-07"],
      [-1e22, "-1e+22"],
    ];
    for (const [value, expected] of cases) {
      expect(reprFloat(value), `reprFloat(${value})`).toBe(expected);
    }
  });

  it("rejects non-finite values", () => {
    expect(() => reprFloat(Number.NaN)).toThrow();
    expect(() => reprFloat(Number.NEGATIVE_INFINITY)).toThrow();
  });
});

describe("roundTiesEven", () => {
  it("rounds exact halves to the even neighbor", () => {
    expect(roundTiesEven(0.5)).toBe(0);
    expect(roundTiesEven(1.5)).toBe(2);
    expect(roundTiesEven(2.5)).toBe(2);
    expect(roundTiesEven(-0.5)).toBe(0);
    expect(roundTiesEven(-1.5)).toBe(-2);
    expect(roundTiesEven(112.5)).toBe(112);
    expect(roundTiesEven(111.5)).toBe(112);
  });

  it("rounds near-half values by their actual double value", () => {
    expect(roundTiesEven(29.999999999999993)).toBe(30);
    expect(roundTiesEven(107.49999999999999)).toBe(107);
  });
});
